#pragma once

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>
#include <openssl/evp.h>

#include "qdent/config.hpp"
#include "qdent/errors.hpp"
#include "qdent/experiments.hpp"
#include "qdent/solvers.hpp"

#ifndef QDENT_VERSION
#define QDENT_VERSION "0.0.0"
#endif

namespace qdent {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitSolver = 3, kExitIo = 4 };

/// Output directory or file could not be written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunOptions {
  unsigned threads = 1;
  bool quiet = false;
  std::ostream* log = &std::cerr;
};

// ---------------------------------------------------------------------------
// Hashing and CSV
// ---------------------------------------------------------------------------

inline std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256: digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) out += kHex[digest[i] >> 4], out += kHex[digest[i] & 15];
  return out;
}

/// Hash identifying a run: tool version plus the resolved configuration,
/// excluding the output directory.
inline std::string run_identity(const RunConfig& config) {
  RunConfig c = config;
  c.output.directory.clear();
  return sha256_hex(std::string("qdent ") + QDENT_VERSION + "\n" + serialize_config(c));
}

/// 17 significant digits, '.' decimal separator, independent of locale.
inline std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, ptr);
}

inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '\n') ch = ' ';
    out += ch;
    if (ch == '"') out += '"';
  }
  return out + "\"";
}

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add(std::vector<std::string> row) {
    if (row.size() != header_.size()) throw std::logic_error("csv row width does not match header");
    rows_.push_back(std::move(row));
  }

  std::string render(const std::string& run_sha) const {
    std::ostringstream o;
    o << "# run_sha256=" << run_sha << "\n";
    write_row(o, header_);
    for (const auto& r : rows_) write_row(o, r);
    return o.str();
  }

  std::size_t rows() const noexcept { return rows_.size(); }

 private:
  static void write_row(std::ostream& o, const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size(); ++i) o << (i ? "," : "") << r[i];
    o << "\n";
  }
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

// ---------------------------------------------------------------------------
// Command implementations
// ---------------------------------------------------------------------------

struct RunOutputs {
  std::vector<std::pair<std::string, CsvTable>> tables;  // file stem → table
  nlohmann::json diagnostics = nlohmann::json::object();
  bool failed = false;  // result written but the run must report a solver error
  std::string failure;
};

namespace detail {

inline const std::vector<std::string>& trajectory_columns() {
  static const std::vector<std::string> cols = {"negativity", "pop_qd1", "pop_qd2", "pop_m1", "pop_m2"};
  return cols;
}

inline CsvTable trajectory_table(const Trajectory& tr) {
  std::vector<std::string> header = {"t_ps"};
  for (const auto& c : trajectory_columns()) header.push_back(c);
  CsvTable t(header);
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    std::vector<std::string> row = {csv_number(tr.times[i])};
    for (const auto& c : trajectory_columns()) row.push_back(csv_number(tr.series(c)[i]));
    t.add(std::move(row));
  }
  return t;
}

inline nlohmann::json trajectory_summary(const Trajectory& tr) {
  const auto& neg = tr.series("negativity");
  const double period = oscillation_period(tr.times, neg, 200.0);
  return {{"samples", tr.times.size()},
          {"peak_negativity", peak(neg)},
          {"oscillation_period_ps", std::isnan(period) ? nlohmann::json(nullptr) : nlohmann::json(period)},
          {"max_trace_drift", tr.diagnostics.max_trace_drift},
          {"max_hermiticity_error", tr.diagnostics.max_hermiticity_error},
          {"min_eigenvalue", tr.diagnostics.min_eigenvalue},
          {"accepted_steps", tr.diagnostics.accepted_steps},
          {"rejected_steps", tr.diagnostics.rejected_steps}};
}

inline Observable observable_by_name(const std::string& name) {
  if (name == "negativity") return negativity_observable();
  if (name == "pop_qd1") return dot_population_observable(0);
  if (name == "pop_qd2") return dot_population_observable(1);
  if (name == "pop_m1") return photon_number_observable(0);
  if (name == "pop_m2") return photon_number_observable(1);
  throw LookupError("unknown observable '" + name + "'");
}

inline RunOutputs run_steady(const RunConfig& c) {
  const SteadyState ss = steady_state(build_liouvillian(c.params), c.policy);
  const auto obs = dimer_observables(ss.rho, c.policy);
  std::vector<std::string> header(trajectory_columns());
  header.insert(header.end(), {"residual", "condition_estimate"});
  CsvTable t(header);
  std::vector<std::string> row;
  for (const auto& col : trajectory_columns()) row.push_back(csv_number(obs.at(col)));
  row.push_back(csv_number(ss.residual));
  row.push_back(csv_number(ss.condition_estimate));
  t.add(std::move(row));
  RunOutputs out;
  out.tables.emplace_back(c.output.name, std::move(t));
  out.diagnostics = {{"residual", ss.residual}, {"condition_estimate", ss.condition_estimate}};
  return out;
}

inline RunOutputs run_dynamics(const RunConfig& c) {
  const auto tr = dynamics_run(c.params, c.dynamics.initial, c.dynamics.horizon, c.dynamics.samples, c.policy);
  RunOutputs out;
  out.tables.emplace_back(c.output.name, trajectory_table(tr));
  out.diagnostics = trajectory_summary(tr);
  return out;
}

inline RunOutputs run_protocol(const RunConfig& c) {
  RunOutputs out;
  double tau = c.dynamics.tau.value_or(0.0);
  if (!c.dynamics.tau) {
    const auto scan = tau_scan(c.params, c.dynamics.initial_detuning, linspace(0.1, 20.0, 200), c.policy);
    CsvTable t({"tau_ps", "pop_m1"});
    for (std::size_t i = 0; i < scan.taus.size(); ++i) {
      t.add({csv_number(scan.taus[i]), csv_number(scan.photon_population[i])});
    }
    out.tables.emplace_back(c.output.name + "_tau_scan", std::move(t));
    tau = scan.best_tau;
  }
  if (!(tau < c.dynamics.horizon)) throw DomainError("protocol: switch time must precede the horizon");
  const auto tr = stark_protocol(c.params, tau, c.dynamics.initial_detuning, c.dynamics.horizon,
                                 c.dynamics.samples, c.policy);
  out.tables.emplace_back(c.output.name, trajectory_table(tr));
  out.diagnostics = trajectory_summary(tr);
  out.diagnostics["tau_ps"] = tau;
  return out;
}

inline std::string axis_column(const std::string& name) {
  return name + "_" + parameter_path(name).unit;
}

inline RunOutputs run_sweep_command(const RunConfig& c, unsigned threads) {
  const auto& s = c.sweep;
  SweepResult res;
  switch (s.kind) {
    case SweepKind::phase_detuning:
      res = sweep_phase_detuning(c.params, s.phi.values(), s.grid.values(), threads, c.policy);
      break;
    case SweepKind::detuning:
      res = sweep_detuning(c.params, s.grid.values(), s.qd_gammas, threads, c.policy);
      break;
    case SweepKind::dephasing:
      res = sweep_dephasing(c.params, s.grid.values(), s.qd_gammas, threads, c.policy);
      break;
    case SweepKind::splitting:
      res = sweep_splitting(c.params, s.grid.values(), s.linewidths, threads, c.policy);
      break;
  }
  std::vector<std::string> header;
  for (const auto& ax : res.axes) header.push_back(axis_column(ax.name));
  for (const auto& r : res.report) {
    const bool echoed = std::any_of(res.axes.begin(), res.axes.end(), [&](const auto& ax) { return ax.name == r; });
    if (!echoed) header.push_back(axis_column(r));
  }
  header.insert(header.end(), {res.observable, "residual", "converged", "note"});
  CsvTable t(header);
  for (const auto& p : res.points) {
    std::vector<std::string> row;
    for (double x : p.coords) row.push_back(csv_number(x));
    for (std::size_t k = 0; k < res.report.size(); ++k) {
      const bool echoed =
          std::any_of(res.axes.begin(), res.axes.end(), [&](const auto& ax) { return ax.name == res.report[k]; });
      if (!echoed) row.push_back(k < p.reported.size() ? csv_number(p.reported.at(k)) : "nan");
    }
    row.push_back(csv_number(p.value));
    row.push_back(csv_number(p.residual));
    row.push_back(p.converged ? "1" : "0");
    row.push_back(csv_quote(p.note));
    t.add(std::move(row));
  }
  RunOutputs out;
  out.tables.emplace_back(c.output.name, std::move(t));
  const std::size_t failures = res.failures();
  double max_residual = 0.0;
  for (const auto& p : res.points) {
    if (p.converged) max_residual = std::max(max_residual, p.residual);
  }
  out.diagnostics = {{"points", res.points.size()}, {"failures", failures}, {"max_residual", max_residual}};
  if (failures < res.points.size()) {
    const auto& best = res.argmax();
    out.diagnostics["argmax"] = {{"coords", best.coords}, {"value", best.value}};
  }
  if (failures > 0 && !s.allow_failures) {
    out.failed = true;
    out.failure = std::to_string(failures) + " sweep point(s) failed; set sweep.allow_failures = true to accept";
  }
  return out;
}

inline RunOutputs run_convergence(const RunConfig& c) {
  const auto rep = convergence_scan(c.params, observable_by_name(c.convergence.observable), c.convergence.cutoffs,
                                    c.convergence.tolerance, c.policy);
  CsvTable t({"cutoff", rep.observable, "relative_difference_to_next", "converged_to_next"});
  for (std::size_t i = 0; i < rep.cutoffs.size(); ++i) {
    const bool has_next = i < rep.relative_differences.size();
    t.add({std::to_string(rep.cutoffs[i]), csv_number(rep.values[i]),
           has_next ? csv_number(rep.relative_differences[i]) : "nan",
           has_next ? (rep.converged[i] ? "1" : "0") : ""});
  }
  RunOutputs out;
  out.tables.emplace_back(c.output.name, std::move(t));
  out.diagnostics = {{"tolerance", rep.tolerance}, {"relative_differences", rep.relative_differences}};
  return out;
}

inline void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  f.close();
  if (!f) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace detail

/// Execute the configured command, writing CSV files and `<name>_manifest.json`
/// into the output directory. Returns a process exit code.
inline int run(const RunConfig& config, const RunOptions& options = {}) {
  auto log = [&](const std::string& msg) {
    if (!options.quiet && options.log) *options.log << "qdent: " << msg << "\n";
  };
  const auto start = std::chrono::steady_clock::now();
  const std::string run_sha = run_identity(config);

  RunOutputs out;
  try {
    log("running '" + std::string(to_string(config.command)) + "'");
    switch (config.command) {
      case Command::steady: out = detail::run_steady(config); break;
      case Command::dynamics: out = detail::run_dynamics(config); break;
      case Command::protocol: out = detail::run_protocol(config); break;
      case Command::sweep: out = detail::run_sweep_command(config, options.threads); break;
      case Command::convergence: out = detail::run_convergence(config); break;
    }
  } catch (const SolverError& e) {
    log(std::string("solver error: ") + e.what());
    return kExitSolver;
  } catch (const IntegrationError& e) {
    log(std::string("integration error: ") + e.what());
    return kExitSolver;
  } catch (const DomainError& e) {
    log(std::string("invalid input: ") + e.what());
    return kExitConfig;
  } catch (const LookupError& e) {
    log(std::string("invalid input: ") + e.what());
    return kExitConfig;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  try {
    const std::filesystem::path dir = config.output.directory.empty() ? "." : config.output.directory;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());

    nlohmann::json files = nlohmann::json::object();
    for (const auto& [stem, table] : out.tables) {
      const std::string bytes = table.render(run_sha);
      const std::string file = stem + ".csv";
      detail::write_file(dir / file, bytes);
      files[file] = {{"sha256", sha256_hex(bytes)}, {"rows", table.rows()}};
      log("wrote " + (dir / file).string());
    }
    nlohmann::json manifest = {
        {"tool", "qdent"},
        {"version", QDENT_VERSION},
        {"run_sha256", run_sha},
        {"command", std::string(to_string(config.command))},
        {"config", serialize_config(config)},
        {"wall_time_s", wall},
        {"threads", options.threads},
        {"diagnostics", out.diagnostics},
        {"files", files},
        {"status", out.failed ? "solver_failure" : "ok"},
    };
    if (out.failed) manifest["failure"] = out.failure;
    detail::write_file(dir / (config.output.name + "_manifest.json"), manifest.dump(2) + "\n");
  } catch (const IoError& e) {
    log(std::string("i/o error: ") + e.what());
    return kExitIo;
  }
  if (out.failed) {
    log(out.failure);
    return kExitSolver;
  }
  return kExitOk;
}

}  // namespace qdent
