#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/SVD>
#include <Eigen/SparseLU>

#include "qdent/entanglement.hpp"
#include "qdent/errors.hpp"
#include "qdent/liouvillian.hpp"
#include "qdent/model.hpp"

namespace qdent {

// ---------------------------------------------------------------------------
// Steady state
// ---------------------------------------------------------------------------

struct SteadyState {
  DensityMatrix rho;
  double residual = 0.0;            // ‖L vec(ρ)‖₂ in ps⁻¹
  double condition_estimate = 0.0;  // ‖A‖₁‖x‖₁/‖b‖₁ for the bordered system
};

namespace detail {

inline double one_norm(const Eigen::SparseMatrix<Complex>& a) {
  double best = 0.0;
  for (Eigen::Index j = 0; j < a.outerSize(); ++j) {
    double s = 0.0;
    for (Eigen::SparseMatrix<Complex>::InnerIterator it(a, j); it; ++it) s += std::abs(it.value());
    best = std::max(best, s);
  }
  return best;
}

/// Null-space dimension of L from its singular values (dense; failure path only).
inline std::size_t kernel_dimension(const Superoperator& l, double ratio) {
  Eigen::BDCSVD<Matrix> svd(l.dense());
  const auto& s = svd.singularValues();
  const double top = s.size() > 0 ? s(0) : 0.0;
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) <= ratio * top) ++k;
  }
  return k;
}

[[noreturn]] inline void throw_singular(const Superoperator& l, double cond, const NumericPolicy& policy) {
  const std::size_t kernel = kernel_dimension(l, policy.degeneracy_ratio);
  if (kernel >= 2) {
    throw SolverError("steady_state: Liouvillian kernel is degenerate (estimated dimension " + std::to_string(kernel) +
                          "), no unique steady state",
                      cond, kernel);
  }
  throw SolverError("steady_state: bordered system is singular to working precision", cond, kernel);
}

}  // namespace detail

/// Unique steady state: replace the first row of L by the trace functional,
/// solve A x = e₀ with a sparse LU, refine once.
inline SteadyState steady_state(const Superoperator& l, const NumericPolicy& policy = default_policy()) {
  const auto n = l.dim();
  const auto d = static_cast<Eigen::Index>(l.space().total_dim());

  std::vector<Eigen::Triplet<Complex>> t;
  t.reserve(static_cast<std::size_t>(l.matrix().nonZeros() + d));
  for (Eigen::Index r = 1; r < n; ++r) {
    for (SparseMatrix::InnerIterator it(l.matrix(), r); it; ++it) t.emplace_back(r, it.col(), it.value());
  }
  for (Eigen::Index k = 0; k < d; ++k) t.emplace_back(0, k * d + k, Complex(1.0));
  Eigen::SparseMatrix<Complex> a(n, n);
  a.setFromTriplets(t.begin(), t.end());
  a.makeCompressed();

  Vector b = Vector::Zero(n);
  b(0) = 1.0;

  Eigen::SparseLU<Eigen::SparseMatrix<Complex>, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) detail::throw_singular(l, INFINITY, policy);
  Vector x = lu.solve(b);
  const Vector r = b - a * x;
  x += lu.solve(r);

  const double cond = detail::one_norm(a) * x.lpNorm<1>() / b.lpNorm<1>();
  if (!x.allFinite() || !(cond < 1.0 / policy.degeneracy_ratio)) detail::throw_singular(l, cond, policy);

  Matrix rho = devectorize(x);
  rho = 0.5 * (rho + rho.adjoint());
  rho /= rho.trace();
  const double residual = l.apply(vectorize(rho)).norm();
  if (!(residual < policy.steady_residual)) {
    throw SolverError("steady_state: residual " + std::to_string(residual) + " exceeds bound", cond);
  }
  NumericPolicy state_policy = policy;
  state_policy.positivity_slack = std::max(policy.positivity_slack, policy.trajectory_positivity_slack);
  return {DensityMatrix(l.space(), std::move(rho), state_policy), residual, cond};
}

// ---------------------------------------------------------------------------
// Adaptive Dormand–Prince 5(4) propagation of dx/dt = L x
// ---------------------------------------------------------------------------

struct IntegratorOptions {
  double rtol = 1e-8;
  double atol = 1e-12;
  double max_step = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 100'000'000;
};

struct PropagationStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  double last_step = 0.0;
};

namespace detail {

struct Dopri5 {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  // b (5th order) minus b̂ (4th order)
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;
};

inline double error_norm(const Vector& err, const Vector& y0, const Vector& y1, double rtol, double atol) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < err.size(); ++i) {
    const double scale = atol + rtol * std::max(std::abs(y0(i)), std::abs(y1(i)));
    const double q = std::abs(err(i)) / scale;
    acc += q * q;
  }
  return std::sqrt(acc / static_cast<double>(std::max<Eigen::Index>(err.size(), 1)));
}

}  // namespace detail

/// Integrate dx/dt = L x from t0 and return x at each of `times` (ascending,
/// ≥ t0). Steps are shortened to land exactly on every requested time.
inline std::vector<Vector> propagate(const SparseMatrix& l, Vector x, double t0, std::span<const double> times,
                                     const IntegratorOptions& opt = {}, PropagationStats* stats = nullptr) {
  using C = detail::Dopri5;
  std::vector<Vector> out;
  out.reserve(times.size());
  if (times.empty()) return out;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t0 || (i > 0 && times[i] <= times[i - 1])) {
      throw DomainError("propagate: output times must be strictly increasing and not before t0");
    }
  }

  double t = t0;
  Vector k1 = l * x;
  Vector k2, k3, k4, k5, k6, k7, y, err;
  PropagationStats local;

  // Initial step from the scale of the derivative.
  double h;
  {
    const double d0 = x.norm();
    const double d1 = k1.norm();
    h = (d0 < 1e-10 || d1 < 1e-10) ? 1e-3 : 0.01 * d0 / d1;
    h = std::min(h, opt.max_step);
  }

  std::size_t next = 0;
  while (next < times.size() && times[next] == t) out.push_back(x), ++next;

  while (next < times.size()) {
    if (local.accepted + local.rejected >= opt.max_steps) {
      throw IntegrationError("propagate: step budget exhausted", t, INFINITY);
    }
    const double target = times[next];
    bool lands = false;
    double step = std::min(h, opt.max_step);
    if (t + step >= target) {
      step = target - t;
      lands = true;
    }
    const double min_step = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));

    k2 = l * (x + step * (C::a21 * k1));
    k3 = l * (x + step * (C::a31 * k1 + C::a32 * k2));
    k4 = l * (x + step * (C::a41 * k1 + C::a42 * k2 + C::a43 * k3));
    k5 = l * (x + step * (C::a51 * k1 + C::a52 * k2 + C::a53 * k3 + C::a54 * k4));
    k6 = l * (x + step * (C::a61 * k1 + C::a62 * k2 + C::a63 * k3 + C::a64 * k4 + C::a65 * k5));
    y = x + step * (C::b1 * k1 + C::b3 * k3 + C::b4 * k4 + C::b5 * k5 + C::b6 * k6);
    k7 = l * y;
    err = step * (C::e1 * k1 + C::e3 * k3 + C::e4 * k4 + C::e5 * k5 + C::e6 * k6 + C::e7 * k7);
    const double en = detail::error_norm(err, x, y, opt.rtol, opt.atol);

    if (en <= 1.0) {
      t = lands ? target : t + step;
      x = std::move(y);
      k1 = std::move(k7);
      ++local.accepted;
      local.last_step = step;
      while (next < times.size() && times[next] <= t) out.push_back(x), ++next;
      const double fac = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
      // A step clipped to an output time says little about the natural step size.
      h = lands ? std::max(h, step * fac) : step * fac;
    } else {
      ++local.rejected;
      h = step * std::max(0.2, 0.9 * std::pow(en, -0.2));
      if (h < min_step) {
        throw IntegrationError("propagate: step size underflow at t = " + std::to_string(t) + " ps", t, en);
      }
    }
  }
  if (stats) *stats = local;
  return out;
}

// ---------------------------------------------------------------------------
// Schedules and trajectories
// ---------------------------------------------------------------------------

struct ScheduleSegment {
  double duration = 0.0;  // ps
  SystemParams params;
};

/// Piecewise-constant parameter schedule; parameters switch instantaneously
/// at segment boundaries.
class Schedule {
 public:
  explicit Schedule(std::vector<ScheduleSegment> segments) : segments_(std::move(segments)) {
    if (segments_.empty()) throw DomainError("Schedule: no segments");
    for (const auto& s : segments_) {
      if (!(s.duration > 0.0) || !std::isfinite(s.duration)) throw DomainError("Schedule: durations must be positive");
      s.params.validate();
      if (!(s.params.space() == segments_.front().params.space())) {
        throw DomainError("Schedule: all segments must share the same space");
      }
    }
  }

  static Schedule constant(const SystemParams& p, double duration) { return Schedule({{duration, p}}); }

  const std::vector<ScheduleSegment>& segments() const noexcept { return segments_; }
  CompositeSpace space() const { return segments_.front().params.space(); }
  double total_duration() const {
    double t = 0.0;
    for (const auto& s : segments_) t += s.duration;
    return t;
  }

 private:
  std::vector<ScheduleSegment> segments_;
};

struct TrajectoryDiagnostics {
  double max_trace_drift = 0.0;
  double max_hermiticity_error = 0.0;
  double min_eigenvalue = 0.0;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
};

struct Trajectory {
  std::vector<double> times;  // ps
  std::vector<DensityMatrix> states;
  std::map<std::string, std::vector<double>> observables;
  TrajectoryDiagnostics diagnostics;

  const std::vector<double>& series(const std::string& name) const {
    auto it = observables.find(name);
    if (it == observables.end()) throw LookupError("trajectory has no observable '" + name + "'");
    return it->second;
  }
};

/// Standard dimer observables: negativity, exciton populations, photon numbers.
inline std::map<std::string, double> dimer_observables(const DensityMatrix& rho,
                                                       const NumericPolicy& policy = default_policy()) {
  const auto& space = rho.space();
  auto number = [&](const Operator& lower) { return rho.expectation(lower.adjoint() * lower).real(); };
  return {
      {"negativity", qd_negativity(rho, policy)},
      {"pop_qd1", number(qubit_lowering(space, kDot1))},
      {"pop_qd2", number(qubit_lowering(space, kDot2))},
      {"pop_m1", number(boson_annihilation(space, kMode1))},
      {"pop_m2", number(boson_annihilation(space, kMode2))},
  };
}

/// Integrate the master equation through every segment of `schedule`,
/// sampling at `t_grid` (ps, ascending, within [0, total duration]).
inline Trajectory evolve(const Schedule& schedule, const DensityMatrix& rho0, std::span<const double> t_grid,
                         const NumericPolicy& policy = default_policy()) {
  const CompositeSpace space = schedule.space();
  if (!(rho0.space() == space)) throw DomainError("evolve: initial state is not on the schedule's space");
  const double total = schedule.total_duration();
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (t_grid[i] < 0.0 || t_grid[i] > total * (1.0 + 1e-12) || (i > 0 && t_grid[i] <= t_grid[i - 1])) {
      throw DomainError("evolve: time grid must be strictly increasing within [0, total duration]");
    }
  }

  NumericPolicy state_policy = policy;
  state_policy.algebraic_tol = std::max(policy.algebraic_tol, policy.trajectory_trace_drift);
  state_policy.positivity_slack = std::max(policy.positivity_slack, policy.trajectory_positivity_slack);

  IntegratorOptions opt;
  opt.rtol = policy.integrator_rtol;
  opt.atol = policy.integrator_atol;

  Trajectory traj;
  traj.diagnostics.min_eigenvalue = INFINITY;
  auto record = [&](double t, const Vector& v) {
    Matrix m = devectorize(v);
    const auto diag = diagnose_state(m);
    auto& d = traj.diagnostics;
    d.max_trace_drift = std::max(d.max_trace_drift, diag.trace_error);
    d.max_hermiticity_error = std::max(d.max_hermiticity_error, diag.hermiticity_error);
    d.min_eigenvalue = std::min(d.min_eigenvalue, diag.min_eigenvalue);
    DensityMatrix rho(space, std::move(m), state_policy);
    for (const auto& [name, value] : dimer_observables(rho, state_policy)) traj.observables[name].push_back(value);
    traj.times.push_back(t);
    traj.states.push_back(std::move(rho));
  };

  Vector x = vectorize(rho0.matrix());
  std::size_t next = 0;
  double t0 = 0.0;
  if (next < t_grid.size() && t_grid[next] == 0.0) record(0.0, x), ++next;
  const auto& segs = schedule.segments();
  for (std::size_t s = 0; s < segs.size(); ++s) {
    const double t1 = (s + 1 == segs.size()) ? total : t0 + segs[s].duration;
    std::vector<double> local;
    std::vector<double> sample_time;  // NaN marks the segment end
    while (next < t_grid.size() && (t_grid[next] <= t1 || s + 1 == segs.size())) {
      local.push_back(std::min(t_grid[next], t1) - t0);
      sample_time.push_back(t_grid[next]);
      ++next;
    }
    if (local.empty() || local.back() < t1 - t0) {
      local.push_back(t1 - t0);
      sample_time.push_back(std::numeric_limits<double>::quiet_NaN());
    }
    const Superoperator l = build_liouvillian(segs[s].params);
    PropagationStats stats;
    auto states = propagate(l.matrix(), x, 0.0, local, opt, &stats);
    traj.diagnostics.accepted_steps += stats.accepted;
    traj.diagnostics.rejected_steps += stats.rejected;
    for (std::size_t i = 0; i < states.size(); ++i) {
      if (!std::isnan(sample_time[i])) record(sample_time[i], states[i]);
    }
    x = states.back();
    t0 = t1;
  }
  if (traj.diagnostics.max_trace_drift > policy.trajectory_trace_drift) {
    throw IntegrationError("evolve: trace drift exceeds bound", t0, traj.diagnostics.max_trace_drift);
  }
  return traj;
}

// ---------------------------------------------------------------------------
// Fock truncation convergence
// ---------------------------------------------------------------------------

struct Observable {
  std::string name;
  std::function<double(const DensityMatrix&)> evaluate;
};

inline Observable negativity_observable() {
  return {"negativity", [](const DensityMatrix& rho) { return qd_negativity(rho); }};
}

inline Observable photon_number_observable(std::size_t mode) {
  return {"pop_m" + std::to_string(mode + 1), [mode](const DensityMatrix& rho) {
            const Operator a = boson_annihilation(rho.space(), mode_position(mode));
            return rho.expectation(a.adjoint() * a).real();
          }};
}

inline Observable dot_population_observable(std::size_t dot) {
  return {"pop_qd" + std::to_string(dot + 1), [dot](const DensityMatrix& rho) {
            const Operator s = qubit_lowering(rho.space(), dot_position(dot));
            return rho.expectation(s.adjoint() * s).real();
          }};
}

struct ConvergenceReport {
  std::string observable;
  std::vector<std::size_t> cutoffs;
  std::vector<double> values;
  std::vector<double> relative_differences;  // between successive cutoffs
  std::vector<bool> converged;               // converged[i]: cutoff i agrees with cutoff i+1
  double tolerance = 0.0;
};

inline double relative_difference(double reference, double value) {
  const double diff = std::abs(value - reference);
  if (diff == 0.0) return 0.0;
  if (std::abs(reference) < 1e-14) return std::abs(value) < 1e-14 ? 0.0 : INFINITY;
  return diff / std::abs(reference);
}

/// Recompute a steady-state observable at each Fock cutoff.
inline ConvergenceReport convergence_scan(const SystemParams& params, const Observable& observable,
                                          const std::vector<std::size_t>& cutoffs, double tolerance = 0.01,
                                          const NumericPolicy& policy = default_policy()) {
  if (cutoffs.empty()) throw DomainError("convergence_scan: no cutoffs");
  for (std::size_t i = 0; i < cutoffs.size(); ++i) {
    if (cutoffs[i] < 1 || (i > 0 && cutoffs[i] <= cutoffs[i - 1])) {
      throw DomainError("convergence_scan: cutoffs must be ascending and at least 1");
    }
  }
  ConvergenceReport rep;
  rep.observable = observable.name;
  rep.cutoffs = cutoffs;
  rep.tolerance = tolerance;
  for (auto c : cutoffs) {
    SystemParams p = params;
    p.truncation = c;
    rep.values.push_back(observable.evaluate(steady_state(build_liouvillian(p), policy).rho));
  }
  for (std::size_t i = 0; i + 1 < rep.values.size(); ++i) {
    rep.relative_differences.push_back(relative_difference(rep.values[i], rep.values[i + 1]));
    rep.converged.push_back(rep.relative_differences.back() < tolerance);
  }
  return rep;
}

}  // namespace qdent
