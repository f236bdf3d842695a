#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "qdent/entanglement.hpp"
#include "qdent/errors.hpp"
#include "qdent/liouvillian.hpp"
#include "qdent/model.hpp"
#include "qdent/solvers.hpp"

namespace qdent {

// ---------------------------------------------------------------------------
// Named parameter paths
// ---------------------------------------------------------------------------

struct ParameterPath {
  std::string name;
  std::string unit;  // "rad" or "ueV"
  std::function<void(SystemParams&, double)> set;
  std::function<double(const SystemParams&)> get;
};

/// Sweepable parameters. "phi" sets φ₁ with φ₂ = 0; "qd_detuning" sets
/// ω⁽²⁾ = ω⁽¹⁾ + Δ; "splitting" sets ω₂ = ω₁ + s; "gamma_d" and "qd_gamma"
/// act on both dots.
inline const std::vector<ParameterPath>& parameter_paths() {
  static const std::vector<ParameterPath> paths = {
      {"phi", "rad", [](SystemParams& p, double v) { p.drive.phase1 = v, p.drive.phase2 = 0.0; },
       [](const SystemParams& p) { return p.drive.phase1 - p.drive.phase2; }},
      {"delta", "ueV", [](SystemParams& p, double v) { p.drive.detuning = v; },
       [](const SystemParams& p) { return p.drive.detuning; }},
      {"qd_detuning", "ueV", [](SystemParams& p, double v) { p.dots[1].omega = p.dots[0].omega + v; },
       [](const SystemParams& p) { return p.dots[1].omega - p.dots[0].omega; }},
      {"gamma_d", "ueV", [](SystemParams& p, double v) { p.dots[0].gamma_d = p.dots[1].gamma_d = v; },
       [](const SystemParams& p) { return p.dots[0].gamma_d; }},
      {"qd_gamma", "ueV", [](SystemParams& p, double v) { p.dots[0].gamma = p.dots[1].gamma = v; },
       [](const SystemParams& p) { return p.dots[0].gamma; }},
      {"splitting", "ueV", [](SystemParams& p, double v) { p.modes[1].omega = p.modes[0].omega + v; },
       [](const SystemParams& p) { return p.splitting(); }},
      {"mode1_gamma", "ueV", [](SystemParams& p, double v) { p.modes[0].gamma = v; },
       [](const SystemParams& p) { return p.modes[0].gamma; }},
      {"mode2_gamma", "ueV", [](SystemParams& p, double v) { p.modes[1].gamma = v; },
       [](const SystemParams& p) { return p.modes[1].gamma; }},
      {"mode1_pump", "ueV", [](SystemParams& p, double v) { p.modes[0].pump = v; },
       [](const SystemParams& p) { return p.modes[0].pump; }},
      {"mode2_pump", "ueV", [](SystemParams& p, double v) { p.modes[1].pump = v; },
       [](const SystemParams& p) { return p.modes[1].pump; }},
      {"drive_amplitude", "ueV", [](SystemParams& p, double v) { p.drive.amplitude = v; },
       [](const SystemParams& p) { return p.drive.amplitude; }},
  };
  return paths;
}

inline const ParameterPath& parameter_path(const std::string& name) {
  for (const auto& p : parameter_paths()) {
    if (p.name == name) return p;
  }
  throw LookupError("unknown sweep parameter '" + name + "'");
}

// ---------------------------------------------------------------------------
// Generic sweeps
// ---------------------------------------------------------------------------

struct SweepAxis {
  std::string name;  // a ParameterPath name
  std::vector<double> values;
};

enum class PumpTracking {
  fixed,       // keep the base pump detuning (or the swept "delta")
  dark_state,  // re-centre the pump on each point's dark state
};

struct SweepSpec {
  SystemParams base;
  std::vector<SweepAxis> axes;  // 1 or 2; the first axis varies slowest
  PumpTracking tracking = PumpTracking::fixed;
  Observable observable = negativity_observable();
  std::vector<std::string> report;  // resolved parameters echoed per point
};

struct SweepPoint {
  std::vector<double> coords;
  std::vector<double> reported;
  double value = std::numeric_limits<double>::quiet_NaN();
  double residual = std::numeric_limits<double>::quiet_NaN();
  bool converged = false;
  std::string note;
};

struct SweepResult {
  std::vector<SweepAxis> axes;
  std::vector<std::string> report;
  std::string observable;
  std::vector<SweepPoint> points;  // row-major over axes

  std::size_t shape(std::size_t axis) const { return axes.at(axis).values.size(); }

  const SweepPoint& at(std::size_t i, std::size_t j = 0) const {
    return axes.size() == 1 ? points.at(i) : points.at(i * shape(1) + j);
  }

  std::size_t failures() const {
    return static_cast<std::size_t>(std::count_if(points.begin(), points.end(), [](const auto& p) { return !p.converged; }));
  }

  const SweepPoint& argmax() const {
    const SweepPoint* best = nullptr;
    for (const auto& p : points) {
      if (p.converged && (!best || p.value > best->value)) best = &p;
    }
    if (!best) throw SolverError("sweep has no converged point", INFINITY);
    return *best;
  }

  /// Values along the last axis at fixed first-axis index (2-axis sweeps).
  std::vector<double> row(std::size_t i) const {
    std::vector<double> out;
    for (std::size_t j = 0; j < shape(1); ++j) out.push_back(at(i, j).value);
    return out;
  }
  std::vector<double> values() const {
    std::vector<double> out;
    for (const auto& p : points) out.push_back(p.value);
    return out;
  }
};

/// Run `n` independent tasks on a pool of worker threads. Task i writes only
/// its own slot, so the result does not depend on scheduling.
inline void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& task) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) task(i);
    });
  }
}

inline SystemParams resolve_point(const SweepSpec& spec, const std::vector<double>& coords) {
  SystemParams p = spec.base;
  for (std::size_t a = 0; a < spec.axes.size(); ++a) parameter_path(spec.axes[a].name).set(p, coords[a]);
  if (spec.tracking == PumpTracking::dark_state) p.drive.detuning = identify_dark_state(p).energy;
  return p;
}

inline SweepResult run_sweep(const SweepSpec& spec, unsigned threads = 1,
                             const NumericPolicy& policy = default_policy()) {
  if (spec.axes.empty() || spec.axes.size() > 2) throw DomainError("sweep needs one or two axes");
  for (const auto& ax : spec.axes) {
    parameter_path(ax.name);
    if (ax.values.empty()) throw DomainError("sweep axis '" + ax.name + "' has an empty grid");
    for (double v : ax.values) {
      if (!std::isfinite(v)) throw DomainError("sweep axis '" + ax.name + "' has a non-finite value");
    }
    if (ax.name == "delta" && spec.tracking == PumpTracking::dark_state) {
      throw DomainError("sweeping 'delta' conflicts with dark-state pump tracking");
    }
  }
  for (const auto& r : spec.report) parameter_path(r);
  spec.base.validate();

  SweepResult res;
  res.axes = spec.axes;
  res.report = spec.report;
  res.observable = spec.observable.name;
  const std::size_t n0 = spec.axes[0].values.size();
  const std::size_t n1 = spec.axes.size() > 1 ? spec.axes[1].values.size() : 1;
  res.points.resize(n0 * n1);
  for (std::size_t i = 0; i < n0; ++i) {
    for (std::size_t j = 0; j < n1; ++j) {
      auto& pt = res.points[i * n1 + j];
      pt.coords.push_back(spec.axes[0].values[i]);
      if (spec.axes.size() > 1) pt.coords.push_back(spec.axes[1].values[j]);
    }
  }

  parallel_for(res.points.size(), threads, [&](std::size_t k) {
    auto& pt = res.points[k];
    try {
      const SystemParams p = resolve_point(spec, pt.coords);
      for (const auto& r : spec.report) pt.reported.push_back(parameter_path(r).get(p));
      const SteadyState ss = steady_state(build_liouvillian(p), policy);
      pt.value = spec.observable.evaluate(ss.rho);
      pt.residual = ss.residual;
      pt.converged = true;
    } catch (const std::exception& e) {
      pt.converged = false;
      pt.note = e.what();
    }
  });
  return res;
}

inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
  if (n == 0) return {};
  if (n == 1) return {lo};
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

/// Default grids used by the CLI and the named sweeps.
struct DefaultGrids {
  static std::vector<double> phi() { return linspace(0.0, 2.0 * std::numbers::pi, 61); }
  static std::vector<double> delta(double g) { return linspace(-3.0 * g, 3.0 * g, 121); }
  static std::vector<double> qd_detuning() { return linspace(-50.0, 50.0, 101); }
  static std::vector<double> gamma_d() { return linspace(0.0, 5.0, 51); }
  static std::vector<double> qd_gamma_family() { return {0.0, 0.66, 3.3, 6.6}; }
};

/// Steady-state negativity over (φ, δ) with φ₂ = 0 and ω_p = ω₁ + δ.
inline SweepResult sweep_phase_detuning(const SystemParams& base, std::vector<double> phi_grid,
                                        std::vector<double> delta_grid, unsigned threads = 1,
                                        const NumericPolicy& policy = default_policy()) {
  SweepSpec spec;
  spec.base = base;
  spec.axes = {{"phi", std::move(phi_grid)}, {"delta", std::move(delta_grid)}};
  return run_sweep(spec, threads, policy);
}

/// Negativity vs exciton detuning Δ (ω⁽²⁾ = ω⁽¹⁾ + Δ) for each dot decay rate.
/// The pump stays at the base configuration's frequency.
inline SweepResult sweep_detuning(const SystemParams& base, std::vector<double> detuning_grid,
                                  std::vector<double> qd_gammas = DefaultGrids::qd_gamma_family(),
                                  unsigned threads = 1, const NumericPolicy& policy = default_policy()) {
  SweepSpec spec;
  spec.base = base;
  spec.axes = {{"qd_gamma", std::move(qd_gammas)}, {"qd_detuning", std::move(detuning_grid)}};
  return run_sweep(spec, threads, policy);
}

/// Negativity vs common pure-dephasing rate for each dot decay rate.
inline SweepResult sweep_dephasing(const SystemParams& base, std::vector<double> gamma_d_grid,
                                   std::vector<double> qd_gammas = DefaultGrids::qd_gamma_family(),
                                   unsigned threads = 1, const NumericPolicy& policy = default_policy()) {
  SweepSpec spec;
  spec.base = base;
  spec.axes = {{"qd_gamma", std::move(qd_gammas)}, {"gamma_d", std::move(gamma_d_grid)}};
  return run_sweep(spec, threads, policy);
}

/// Negativity vs normal-mode splitting with the pump following the dark state.
/// Each linewidth pair (γ₁, γ₂) gives one row; an empty list keeps the base linewidths.
inline SweepResult sweep_splitting(const SystemParams& base, std::vector<double> splitting_grid,
                                   const std::vector<std::pair<double, double>>& linewidths = {},
                                   unsigned threads = 1, const NumericPolicy& policy = default_policy()) {
  SweepSpec spec;
  spec.base = base;
  spec.tracking = PumpTracking::dark_state;
  spec.report = {"mode1_gamma", "mode2_gamma", "delta"};
  if (linewidths.empty()) {
    spec.axes = {{"splitting", std::move(splitting_grid)}};
    return run_sweep(spec, threads, policy);
  }
  // One 1-axis sweep per linewidth pair, concatenated into a 2-axis result
  // whose first axis is γ₁.
  SweepResult out;
  out.report = spec.report;
  out.observable = spec.observable.name;
  out.axes = {{"mode1_gamma", {}}, {"splitting", splitting_grid}};
  for (const auto& [g1, g2] : linewidths) {
    SweepSpec row = spec;
    row.base.modes[0].gamma = g1;
    row.base.modes[1].gamma = g2;
    row.axes = {{"splitting", splitting_grid}};
    auto r = run_sweep(row, threads, policy);
    out.axes[0].values.push_back(g1);
    for (auto& p : r.points) {
      p.coords.insert(p.coords.begin(), g1);
      out.points.push_back(std::move(p));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Transient dynamics
// ---------------------------------------------------------------------------

enum class InitialState { qd1_excited, photon_mode1, vacuum };

inline DensityMatrix initial_state(InitialState kind, const CompositeSpace& space) {
  std::vector<std::size_t> digits(4, 0);
  switch (kind) {
    case InitialState::qd1_excited: digits[kDot1] = 1; break;
    case InitialState::photon_mode1: digits[kMode1] = 1; break;
    case InitialState::vacuum: break;
  }
  return DensityMatrix::basis_state(space, digits);
}

/// Base parameters with the pump on the dark state and the bonding-mode
/// phase difference φ = π.
inline SystemParams drive_at_dark_state(SystemParams p) {
  p.drive.phase1 = std::numbers::pi;
  p.drive.phase2 = 0.0;
  p.drive.detuning = identify_dark_state(p).energy;
  return p;
}

inline Trajectory dynamics_run(const SystemParams& base, InitialState initial, double horizon, std::size_t samples,
                               const NumericPolicy& policy = default_policy()) {
  if (!(horizon > 0.0) || samples < 2) throw DomainError("dynamics_run: need a positive horizon and ≥ 2 samples");
  const SystemParams p = drive_at_dark_state(base);
  const auto grid = linspace(0.0, horizon, samples);
  return evolve(Schedule::constant(p, horizon), initial_state(initial, p.space()), grid, policy);
}

/// Two-segment protocol: dot 2 detuned by `initial_detuning` for t < τ, then
/// switched into resonance. Starts from |1000⟩; pump on the resonant dark state throughout.
inline Trajectory stark_protocol(const SystemParams& base, double tau, double initial_detuning, double horizon,
                                 std::size_t samples, const NumericPolicy& policy = default_policy()) {
  if (!(tau > 0.0) || !(horizon > tau) || samples < 2) {
    throw DomainError("stark_protocol: need 0 < tau < horizon and ≥ 2 samples");
  }
  const SystemParams resonant = drive_at_dark_state(base);
  SystemParams detuned = resonant;
  detuned.dots[1].omega = resonant.dots[0].omega + initial_detuning;
  const Schedule schedule({{tau, detuned}, {horizon - tau, resonant}});
  const auto grid = linspace(0.0, horizon, samples);
  return evolve(schedule, initial_state(InitialState::qd1_excited, resonant.space()), grid, policy);
}

struct TauScan {
  std::vector<double> taus;
  std::vector<double> photon_population;  // ⟨a₁†a₁⟩ at the switch time
  double best_tau = 0.0;
};

/// Mode-1 population reached during the detuned segment, as a function of
/// the switch time; the optimum is the transfer time to use for τ.
inline TauScan tau_scan(const SystemParams& base, double initial_detuning, std::vector<double> taus,
                        const NumericPolicy& policy = default_policy()) {
  if (taus.empty()) throw DomainError("tau_scan: empty grid");
  SystemParams detuned = drive_at_dark_state(base);
  detuned.dots[1].omega = detuned.dots[0].omega + initial_detuning;
  const auto traj = evolve(Schedule::constant(detuned, taus.back()),
                           initial_state(InitialState::qd1_excited, detuned.space()), taus, policy);
  TauScan out;
  out.taus = std::move(taus);
  out.photon_population = traj.series("pop_m1");
  const auto it = std::max_element(out.photon_population.begin(), out.photon_population.end());
  out.best_tau = out.taus[static_cast<std::size_t>(it - out.photon_population.begin())];
  return out;
}

inline double peak(const std::vector<double>& series) {
  if (series.empty()) throw DomainError("peak: empty series");
  return *std::max_element(series.begin(), series.end());
}

/// Oscillation period from mean-crossings of `series` restricted to t ≥ t_min:
/// twice the mean spacing of successive crossings. NaN when fewer than
/// three crossings are found.
inline double oscillation_period(const std::vector<double>& times, const std::vector<double>& series, double t_min) {
  if (times.size() != series.size()) throw DomainError("oscillation_period: length mismatch");
  std::vector<double> t, y;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] >= t_min) t.push_back(times[i]), y.push_back(series[i]);
  }
  if (y.size() < 3) return std::numeric_limits<double>::quiet_NaN();
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  std::vector<double> crossings;
  for (std::size_t i = 1; i < y.size(); ++i) {
    const double a = y[i - 1] - mean;
    const double b = y[i] - mean;
    if ((a < 0.0) != (b < 0.0)) crossings.push_back(t[i - 1] + (t[i] - t[i - 1]) * a / (a - b));
  }
  if (crossings.size() < 3) return std::numeric_limits<double>::quiet_NaN();
  return 2.0 * (crossings.back() - crossings.front()) / static_cast<double>(crossings.size() - 1);
}

}  // namespace qdent
