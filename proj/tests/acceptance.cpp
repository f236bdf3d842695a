// Acceptance runner: `acceptance <C1..C9|all>` prints one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "qdent/cli.hpp"
#include "qdent/experiments.hpp"
#include "qdent/units.hpp"
#include "test_support.hpp"

using namespace qdent;

namespace {

constexpr double kPi = std::numbers::pi;

// Pinned tolerances.
constexpr double kBellTol = 1e-10;
constexpr double kFig2Peak = 0.103, kFig2PeakTol = 0.02;
constexpr double kTruncationTol = 0.01;
constexpr double kDephasingRatio = 0.82, kDephasingRatioTol = 0.05;
constexpr double kDetuningRatioLo = 0.20, kDetuningRatioHi = 0.30, kFarDetuningMax = 0.01;
constexpr double kBlochTol = 1e-8;
constexpr double kTransferTime = 9.40, kTransferTimeTol = 0.005, kTransferPopTol = 1e-6;
constexpr double kPhotonPeakMin = 0.45;
constexpr double kStarkPeak = 0.2, kStarkPeakTol = 0.05;
constexpr double kPeriodRelTol = 0.15;
constexpr double kTraceTol = 1e-10, kDissipativeTol = 1e-9, kSparseDenseTol = 1e-12, kExpmTol = 1e-7,
                 kLocalUnitaryTol = 1e-10;

struct Check {
  std::string name;
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

SystemParams dc901() { return preset_params("dimer30_dc901"); }

double steady_negativity(const SystemParams& p) { return qd_negativity(steady_state(build_liouvillian(p)).rho); }

// ---------------------------------------------------------------------------

std::vector<Check> c1() {
  double worst_n = 0.0, worst_spec = 0.0;
  for (auto kind : {BellKind::phi_plus, BellKind::phi_minus, BellKind::psi_plus, BellKind::psi_minus}) {
    const auto rho = bell_state(kind);
    worst_n = std::max(worst_n, std::abs(negativity(rho) - 0.5));
    const Eigen::VectorXd ev = hermitian_eigenvalues(partial_transpose_first(rho));
    const Eigen::Vector4d expected(-0.5, 0.5, 0.5, 0.5);
    worst_spec = std::max(worst_spec, (ev - expected).cwiseAbs().maxCoeff());
  }
  return {{"bell negativity", worst_n < kBellTol, fmt("max |N-0.5| = %.2e", worst_n)},
          {"partial transpose spectrum", worst_spec < kBellTol, fmt("max deviation = %.2e", worst_spec)}};
}

std::vector<Check> c2() {
  const auto base = dc901();
  const double g = std::abs(base.coupling[0][0]);
  const auto phi = DefaultGrids::phi();
  const auto delta = DefaultGrids::delta(g);
  const auto start = std::chrono::steady_clock::now();
  const auto res = sweep_phase_detuning(base, phi, delta, 0);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const auto& best = res.argmax();
  const double dphi = phi[1] - phi[0];
  const double ddelta = delta[1] - delta[0];
  const double dark = identify_dark_state(base).energy;
  return {
      {"no failed points", res.failures() == 0, fmt("%zu of %zu failed", res.failures(), res.points.size())},
      {"phi at pi", std::abs(best.coords[0] - kPi) <= dphi * (1 + 1e-9), fmt("phi* = %.4f", best.coords[0])},
      {"delta at dark state", std::abs(best.coords[1] - dark) <= ddelta * (1 + 1e-9),
       fmt("delta* = %.2f, delta_dark = %.2f ueV", best.coords[1], dark)},
      {"peak value", std::abs(best.value - kFig2Peak) <= kFig2PeakTol, fmt("N* = %.4f", best.value)},
      {"runtime", true, fmt("%.1f s for %zu points", secs, res.points.size())},
  };
}

std::vector<Check> c3() {
  const auto rep = convergence_scan(dc901(), negativity_observable(), {1, 2}, kTruncationTol);
  return {{"cutoff 1 vs 2", rep.relative_differences[0] < kTruncationTol,
           fmt("N(1) = %.5f, N(2) = %.5f, rel diff = %.2f%% (limit 1%%)", rep.values[0], rep.values[1],
               100.0 * rep.relative_differences[0])}};
}

std::vector<Check> c4() {
  auto p = dc901();
  p.dots[0].gamma = p.dots[1].gamma = 0.0;
  const double n0 = steady_negativity(p);
  p.dots[0].gamma_d = p.dots[1].gamma_d = 1.0;
  const double n1 = steady_negativity(p);
  const double ratio = n1 / n0;
  return {{"dephasing ratio", std::abs(ratio - kDephasingRatio) <= kDephasingRatioTol,
           fmt("N(1)/N(0) = %.4f/%.4f = %.3f", n1, n0, ratio)}};
}

std::vector<Check> c5() {
  auto p = dc901();
  p.dots[0].gamma = p.dots[1].gamma = 0.0;
  const auto res = sweep_detuning(p, {0.0, 10.0, 41.0, 45.0, 50.0, -41.0, -50.0}, {0.0});
  const double n0 = res.at(0, 0).value;
  const double ratio = res.at(0, 1).value / n0;
  double far = 0.0;
  for (std::size_t j = 2; j < 7; ++j) far = std::max(far, res.at(0, j).value);
  return {{"ratio at 10 ueV", ratio >= kDetuningRatioLo && ratio <= kDetuningRatioHi, fmt("N(10)/N(0) = %.3f", ratio)},
          {"beyond 40 ueV", far < kFarDetuningMax, fmt("max N(|D|>40) = %.4f", far)}};
}

std::vector<Check> c6() {
  double worst = 0.0;
  for (double rabi : {0.1, 0.5, 1.0, 5.0, 20.0}) {
    for (double gamma : {0.2, 1.0, 3.0, 10.0, 40.0}) {
      SystemParams p;
      p.modes[0] = {1.3e6, 20.0, 0.0};
      p.modes[1] = {1.3e6 + 2000.0, 20.0, 0.0};
      p.dots[0] = {1.3e6, gamma, 0.0};
      p.dots[1] = {1.3e6, gamma, 0.0};
      p.drive.amplitude = rabi;
      const auto obs = dimer_observables(steady_state(build_liouvillian(p)).rho);
      const double expected = rabi * rabi / (gamma * gamma / 4.0 + 2.0 * rabi * rabi);
      worst = std::max({worst, std::abs(obs.at("pop_qd1") - expected), std::abs(obs.at("pop_qd2") - expected)});
    }
  }
  return {{"5x5 grid", worst < kBlochTol, fmt("max |p_e - oracle| = %.2e", worst)}};
}

std::vector<Check> c7() {
  SystemParams p;
  p.modes[0].omega = 1.3e6;
  p.modes[1].omega = 1.3e6 + 1000.0;
  p.dots[0].omega = p.dots[1].omega = 1.3e6;
  const double g = 110.0;
  p.coupling[0][0] = g;
  const double t = kPi * units::kHbar / (2.0 * g);
  const std::vector<double> grid{0.0, t};
  const auto traj = evolve(Schedule::constant(p, t), initial_state(InitialState::qd1_excited, p.space()), grid);
  const double err = std::abs(1.0 - traj.series("pop_m1").back());
  return {{"transfer time", std::abs(t - kTransferTime) < kTransferTimeTol, fmt("t = %.4f ps", t)},
          {"population", err < kTransferPopTol, fmt("|1 - <n1>| = %.2e", err)}};
}

std::vector<Check> c8() {
  const auto base = dc901();
  const auto photon = dynamics_run(base, InitialState::photon_mode1, 30000.0, 6001);
  const double photon_peak = peak(photon.series("negativity"));
  const double period = oscillation_period(photon.times, photon.series("negativity"), 200.0);
  const double expected_period = 4.0 * kPi * units::kHbar / base.drive.amplitude;

  auto lossy = base;
  lossy.dots[0].gamma = lossy.dots[1].gamma = 0.66;
  const auto stark = stark_protocol(lossy, 9.0, 1000.0, 10000.0, 2001);
  const double stark_peak = peak(stark.series("negativity"));
  return {{"photon-initialised peak", photon_peak > kPhotonPeakMin, fmt("N_max = %.4f", photon_peak)},
          {"stark protocol peak", std::abs(stark_peak - kStarkPeak) <= kStarkPeakTol,
           fmt("N_max = %.4f (target 0.20 +- 0.05)", stark_peak)},
          {"slow oscillation period", std::abs(period / expected_period - 1.0) <= kPeriodRelTol,
           fmt("T = %.0f ps vs 4*pi*hbar/Omega0 = %.0f ps", period, expected_period)}};
}

/// Generator assembled densely from Kronecker products of the model operators.
Matrix dense_generator(const SystemParams& p) {
  const auto space = p.space();
  const Matrix h = build_effective_hamiltonian(p, space).matrix();
  const auto d = h.rows();
  const Matrix id = Matrix::Identity(d, d);
  Matrix l = Complex(0.0, -1.0) * (Matrix(Eigen::kroneckerProduct(id, h)) - Matrix(Eigen::kroneckerProduct(h.transpose(), id)));
  auto add = [&](const Matrix& c, double rate) {
    const Matrix cdc = c.adjoint() * c;
    l += rate * (Matrix(Eigen::kroneckerProduct(c.conjugate(), c)) - 0.5 * Matrix(Eigen::kroneckerProduct(id, cdc)) -
                 0.5 * Matrix(Eigen::kroneckerProduct(cdc.transpose(), id)));
  };
  for (std::size_t m = 0; m < 2; ++m) {
    const Matrix a = boson_annihilation(space, mode_position(m)).matrix();
    add(a, p.modes[m].gamma);
    add(a.adjoint(), p.modes[m].pump);
  }
  for (std::size_t n = 0; n < 2; ++n) {
    const Matrix s = qubit_lowering(space, dot_position(n)).matrix();
    add(s, p.dots[n].gamma);
    add(s.adjoint() * s, 2.0 * p.dots[n].gamma_d);
  }
  return l / units::kHbar;
}

SystemParams random_params(qdent::testing::Gen& gen, std::size_t truncation) {
  auto p = dc901();
  p.truncation = truncation;
  for (auto& m : p.modes) m.gamma = gen.uniform(0.0, 80.0), m.pump = gen.uniform(0.0, 2.0);
  for (auto& q : p.dots) q.gamma = gen.uniform(0.0, 5.0), q.gamma_d = gen.uniform(0.0, 3.0);
  p.dots[1].omega += gen.uniform(-20.0, 20.0);
  p.coupling[0][1] = gen.complex_normal() * 80.0;
  p.drive.amplitude = gen.uniform(0.0, 10.0);
  p.drive.phase1 = gen.uniform(0.0, 2.0 * kPi);
  p.drive.detuning = gen.uniform(-300.0, 300.0);
  return p;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::vector<Check> c9() {
  qdent::testing::Gen gen(2024);
  std::vector<SystemParams> cases;
  for (const auto& name : preset_names()) cases.push_back(preset_params(name));
  for (int k = 0; k < 6; ++k) cases.push_back(random_params(gen, k % 2 ? 2 : 1));

  double trace_err = 0.0, max_re = -INFINITY, sparse_dense = 0.0;
  for (const auto& p : cases) {
    const Superoperator l = build_liouvillian(p);
    const Vector tr = trace_functional(static_cast<Eigen::Index>(p.space().total_dim()));
    trace_err = std::max(trace_err, (l.matrix().adjoint() * tr).cwiseAbs().maxCoeff());
    const Matrix dense = l.dense();
    sparse_dense = std::max(sparse_dense, (dense - dense_generator(p)).cwiseAbs().maxCoeff());
    if (p.truncation == 1) {
      Eigen::ComplexEigenSolver<Matrix> es(dense, false);
      max_re = std::max(max_re, es.eigenvalues().real().maxCoeff());
    }
  }

  double expm_err = 0.0;
  {
    const auto p = random_params(gen, 1);
    const Superoperator l = build_liouvillian(p);
    const Matrix dense = l.dense();
    const Vector x0 = vectorize(initial_state(InitialState::photon_mode1, p.space()).matrix());
    const std::vector<double> times{0.3, 1.0, 4.0, 9.4, 20.0, 50.0, 100.0, 200.0, 400.0, 800.0};
    const auto out = propagate(l.matrix(), x0, 0.0, times);
    for (std::size_t i = 0; i < times.size(); ++i) {
      const Matrix u = (dense * times[i]).exp();
      expm_err = std::max(expm_err, (out[i] - u * x0).cwiseAbs().maxCoeff());
    }
  }

  double lu_err = 0.0;
  for (int k = 0; k < 200; ++k) {
    Matrix rho = gen.density(4);
    if (k % 2 == 0) {
      const Vector psi = gen.state_vector(4);
      rho = 0.7 * psi * psi.adjoint() + 0.3 * rho;
    }
    const Matrix u = qdent::testing::kron(gen.unitary(2), gen.unitary(2));
    Matrix rotated = u * rho * u.adjoint();
    rotated = 0.5 * (rotated + rotated.adjoint());
    lu_err = std::max(lu_err, std::abs(negativity(TwoQubitState(rho)) - negativity(TwoQubitState(rotated))));
  }

  bool identical = false;
  std::string bytes_detail;
  {
    namespace fs = std::filesystem;
    const fs::path root = fs::temp_directory_path() / "qdent_acceptance_c9";
    fs::remove_all(root);
    auto cfg = parse_config(
        "command = sweep\npreset = dimer30_dc901\n[sweep]\nkind = phase_detuning\npoints = 9\nphi_points = 7\n");
    RunOptions opt;
    opt.quiet = true;
    std::vector<std::string> outputs;
    for (unsigned threads : {1u, 4u, 1u}) {
      opt.threads = threads;
      cfg.output.directory = (root / std::to_string(outputs.size())).string();
      if (run(cfg, opt) != kExitOk) break;
      outputs.push_back(slurp(fs::path(cfg.output.directory) / "sweep.csv"));
    }
    identical = outputs.size() == 3 && !outputs[0].empty() && outputs[0] == outputs[1] && outputs[1] == outputs[2];
    bytes_detail = fmt("%zu runs, %zu bytes, sha256 %s", outputs.size(), outputs.empty() ? 0 : outputs[0].size(),
                       outputs.empty() ? "-" : sha256_hex(outputs[0]).substr(0, 12).c_str());
    fs::remove_all(root);
  }

  return {{"trace preservation", trace_err < kTraceTol, fmt("max |<<I|L| = %.2e", trace_err)},
          {"dissipativity", max_re <= kDissipativeTol, fmt("max Re(lambda) = %.2e", max_re)},
          {"sparse vs dense", sparse_dense < kSparseDenseTol, fmt("max diff = %.2e", sparse_dense)},
          {"evolve vs expm", expm_err < kExpmTol, fmt("max diff = %.2e", expm_err)},
          {"local unitary invariance", lu_err < kLocalUnitaryTol, fmt("max diff = %.2e", lu_err)},
          {"deterministic sweep bytes", identical, bytes_detail}};
}

const std::map<std::string, std::pair<std::string, std::function<std::vector<Check>()>>>& criteria() {
  static const std::map<std::string, std::pair<std::string, std::function<std::vector<Check>()>>> table = {
      {"C1", {"Bell-state negativity", c1}},
      {"C2", {"phase/detuning map maximum", c2}},
      {"C3", {"Fock truncation convergence", c3}},
      {"C4", {"dephasing ratio", c4}},
      {"C5", {"QD detuning collapse", c5}},
      {"C6", {"optical Bloch oracle", c6}},
      {"C7", {"vacuum Rabi transfer", c7}},
      {"C8", {"dynamics peaks", c8}},
      {"C9", {"property suites", c9}},
  };
  return table;
}

bool report(const std::string& id) {
  const auto& [title, fn] = criteria().at(id);
  std::vector<Check> checks;
  try {
    checks = fn();
  } catch (const std::exception& e) {
    checks = {{"exception", false, e.what()}};
  }
  bool pass = true;
  std::string detail;
  for (const auto& c : checks) {
    pass = pass && c.pass;
    detail += (detail.empty() ? "" : "; ") + std::string(c.pass ? "" : "[x] ") + c.name + ": " + c.detail;
  }
  std::printf("%s %s %s | %s\n", pass ? "PASS" : "FAIL", id.c_str(), title.c_str(), detail.c_str());
  std::fflush(stdout);
  return pass;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string which = argc > 1 ? argv[1] : "all";
  if (which != "all" && !criteria().contains(which)) {
    std::fprintf(stderr, "usage: acceptance [C1..C9|all]\n");
    return 2;
  }
  bool ok = true;
  for (const auto& [id, entry] : criteria()) {
    if (which == "all" || which == id) ok = report(id) && ok;
  }
  return ok ? 0 : 1;
}
