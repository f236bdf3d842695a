#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <iomanip>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "qdent/errors.hpp"
#include "qdent/experiments.hpp"
#include "qdent/model.hpp"
#include "qdent/numeric_policy.hpp"

namespace qdent {

/// Invalid configuration text. `line()` is 0 when the problem is not tied to a line.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

enum class Command { steady, dynamics, sweep, protocol, convergence };
enum class SweepKind { phase_detuning, detuning, dephasing, splitting };

struct GridSpec {
  double min = 0.0;
  double max = 0.0;
  std::size_t points = 1;

  std::vector<double> values() const { return linspace(min, max, points); }
  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct SweepOptions {
  SweepKind kind = SweepKind::phase_detuning;
  GridSpec grid;  // δ, Δ, γ_d or splitting, depending on kind
  GridSpec phi{0.0, 2.0 * std::numbers::pi, 61};
  std::vector<double> qd_gammas = DefaultGrids::qd_gamma_family();
  std::vector<std::pair<double, double>> linewidths;
  bool allow_failures = false;
  friend bool operator==(const SweepOptions&, const SweepOptions&) = default;
};

struct DynamicsOptions {
  InitialState initial = InitialState::photon_mode1;
  double horizon = 10000.0;  // ps
  std::size_t samples = 2001;
  std::optional<double> tau = 9.0;  // ps; empty → located by a scan
  double initial_detuning = 1000.0;  // μeV
  friend bool operator==(const DynamicsOptions&, const DynamicsOptions&) = default;
};

struct ConvergenceOptions {
  std::vector<std::size_t> cutoffs{1, 2, 3};
  double tolerance = 0.01;
  std::string observable = "negativity";
  friend bool operator==(const ConvergenceOptions&, const ConvergenceOptions&) = default;
};

struct OutputOptions {
  std::string directory = ".";
  std::string name;  // file stem; defaults to the command name
  friend bool operator==(const OutputOptions&, const OutputOptions&) = default;
};

struct RunConfig {
  Command command = Command::steady;
  std::string preset;  // empty when the system is given explicitly
  SystemParams params;
  SweepOptions sweep;
  DynamicsOptions dynamics;
  ConvergenceOptions convergence;
  OutputOptions output;
  NumericPolicy policy;
  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// ---------------------------------------------------------------------------
// Enum names
// ---------------------------------------------------------------------------

namespace detail {

template <class E>
struct EnumName {
  E value;
  std::string_view name;
};

inline constexpr EnumName<Command> kCommands[] = {{Command::steady, "steady"},
                                                  {Command::dynamics, "dynamics"},
                                                  {Command::sweep, "sweep"},
                                                  {Command::protocol, "protocol"},
                                                  {Command::convergence, "convergence"}};
inline constexpr EnumName<SweepKind> kSweepKinds[] = {{SweepKind::phase_detuning, "phase_detuning"},
                                                      {SweepKind::detuning, "detuning"},
                                                      {SweepKind::dephasing, "dephasing"},
                                                      {SweepKind::splitting, "splitting"}};
inline constexpr EnumName<InitialState> kInitialStates[] = {{InitialState::qd1_excited, "qd1_excited"},
                                                            {InitialState::photon_mode1, "photon_mode1"},
                                                            {InitialState::vacuum, "vacuum"}};

template <class E, std::size_t N>
std::string_view enum_name(const EnumName<E> (&table)[N], E v) {
  for (const auto& e : table) {
    if (e.value == v) return e.name;
  }
  return "?";
}

template <class E, std::size_t N>
std::optional<E> enum_parse(const EnumName<E> (&table)[N], std::string_view s) {
  for (const auto& e : table) {
    if (e.name == s) return e.value;
  }
  return std::nullopt;
}

template <class E, std::size_t N>
std::string enum_choices(const EnumName<E> (&table)[N]) {
  std::string out;
  for (const auto& e : table) out += (out.empty() ? "" : ", ") + std::string(e.name);
  return out;
}

}  // namespace detail

inline std::string_view to_string(Command c) { return detail::enum_name(detail::kCommands, c); }
inline std::string_view to_string(SweepKind k) { return detail::enum_name(detail::kSweepKinds, k); }
inline std::string_view to_string(InitialState s) { return detail::enum_name(detail::kInitialStates, s); }

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::string unquote(std::string s) {
  s = trim(s);
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) s = s.substr(1, s.size() - 2);
  return s;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

/// Maps "section.key" (or "key" at top level) to its 1-based line number.
inline std::map<std::string, std::size_t> key_lines(const std::string& text) {
  std::map<std::string, std::size_t> out;
  std::istringstream in(text);
  std::string line, section;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    const std::string t = trim(line);
    if (t.empty() || t[0] == ';' || t[0] == '#') continue;
    if (t.front() == '[' && t.back() == ']') {
      section = trim(std::string_view(t).substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = trim(std::string_view(t).substr(0, eq));
    out.emplace(section.empty() ? key : section + "." + key, n);
  }
  return out;
}

class Reader {
 public:
  Reader(const boost::property_tree::ptree& tree, std::map<std::string, std::size_t> lines)
      : tree_(tree), lines_(std::move(lines)) {}

  bool has(const std::string& path) const { return raw(path).has_value(); }

  std::optional<std::string> raw(const std::string& path) const {
    const auto node = tree_.get_child_optional(boost::property_tree::ptree::path_type(path, '.'));
    if (!node || !node->empty()) return std::nullopt;
    return unquote(node->data());
  }

  [[noreturn]] void fail(const std::string& path, const std::string& what) const {
    const auto it = lines_.find(path);
    throw ConfigError("'" + path + "': " + what, it == lines_.end() ? 0 : it->second);
  }

  double number(const std::string& path, const std::string& text) const {
    double v = 0.0;
    const char* b = text.data();
    const char* e = b + text.size();
    const auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || ptr != e || !std::isfinite(v)) fail(path, "expected a finite number, got '" + text + "'");
    return v;
  }

  std::size_t count(const std::string& path, const std::string& text, std::size_t minimum) const {
    long long v = 0;
    const char* b = text.data();
    const char* e = b + text.size();
    const auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || ptr != e) fail(path, "expected an integer, got '" + text + "'");
    if (v < static_cast<long long>(minimum)) {
      fail(path, "value " + text + " out of range (minimum " + std::to_string(minimum) + ")");
    }
    return static_cast<std::size_t>(v);
  }

  void read(const std::string& path, double& out, std::optional<double> minimum = std::nullopt) const {
    if (auto s = raw(path)) {
      out = number(path, *s);
      if (minimum && out < *minimum) {
        std::ostringstream m;
        m << "value " << *s << " out of range (minimum " << *minimum << ")";
        fail(path, m.str());
      }
    }
  }
  void read(const std::string& path, std::size_t& out, std::size_t minimum) const {
    if (auto s = raw(path)) out = count(path, *s, minimum);
  }
  void read(const std::string& path, bool& out) const {
    if (auto s = raw(path)) {
      if (*s == "true" || *s == "1") out = true;
      else if (*s == "false" || *s == "0") out = false;
      else fail(path, "expected true or false, got '" + *s + "'");
    }
  }
  template <class E, std::size_t N>
  void read(const std::string& path, E& out, const EnumName<E> (&table)[N]) const {
    if (auto s = raw(path)) {
      auto v = enum_parse(table, *s);
      if (!v) fail(path, "unknown value '" + *s + "' (expected one of: " + enum_choices(table) + ")");
      out = *v;
    }
  }
  void read_list(const std::string& path, std::vector<double>& out) const {
    if (auto s = raw(path)) {
      out.clear();
      for (const auto& item : split(*s, ',')) {
        if (!item.empty()) out.push_back(number(path, item));
      }
    }
  }

 private:
  const boost::property_tree::ptree& tree_;
  std::map<std::string, std::size_t> lines_;
};

inline const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"", {"command", "preset"}},
      {"system",
       {"truncation", "mode1_omega", "mode1_gamma", "mode1_pump", "mode2_omega", "mode2_gamma", "mode2_pump",
        "qd1_omega", "qd1_gamma", "qd1_gamma_d", "qd2_omega", "qd2_gamma", "qd2_gamma_d", "g_m1_qd1_re",
        "g_m1_qd1_im", "g_m1_qd2_re", "g_m1_qd2_im", "g_m2_qd1_re", "g_m2_qd1_im", "g_m2_qd2_re", "g_m2_qd2_im"}},
      {"drive", {"amplitude", "phase1", "phase2", "detuning"}},
      {"sweep",
       {"kind", "min", "max", "points", "phi_min", "phi_max", "phi_points", "qd_gammas", "linewidths",
        "allow_failures"}},
      {"dynamics", {"initial", "horizon", "samples", "tau", "initial_detuning"}},
      {"convergence", {"cutoffs", "tolerance", "observable"}},
      {"output", {"directory", "name"}},
      {"numeric",
       {"algebraic_tol", "positivity_slack", "eigen_noise_floor", "steady_residual", "degeneracy_ratio",
        "integrator_rtol", "integrator_atol", "trajectory_trace_drift", "trajectory_positivity_slack"}},
  };
  return keys;
}

/// Keys that must all be present when no preset is given (the coupling
/// imaginary parts and pump rates default to zero).
inline std::vector<std::string> required_system_keys() {
  return {"mode1_omega", "mode1_gamma", "mode2_omega", "mode2_gamma", "qd1_omega",   "qd1_gamma",
          "qd2_omega",   "qd2_gamma",   "g_m1_qd1_re", "g_m1_qd2_re", "g_m2_qd1_re", "g_m2_qd2_re"};
}

inline void check_keys(const boost::property_tree::ptree& tree, const std::map<std::string, std::size_t>& lines) {
  const auto& known = known_keys();
  for (const auto& [name, child] : tree) {
    const auto line_of = [&](const std::string& p) {
      const auto it = lines.find(p);
      return it == lines.end() ? std::size_t{0} : it->second;
    };
    if (child.empty()) {
      if (!known.at("").contains(name)) throw ConfigError("unknown key '" + name + "'", line_of(name));
      continue;
    }
    const auto sec = known.find(name);
    if (sec == known.end() || name.empty()) {
      throw ConfigError("unknown section [" + name + "]", line_of(name + "." + child.begin()->first));
    }
    for (const auto& [key, value] : child) {
      if (!sec->second.contains(key)) {
        throw ConfigError("unknown key '" + key + "' in section [" + name + "]", line_of(name + "." + key));
      }
    }
  }
}

inline void read_system(const Reader& r, SystemParams& p) {
  r.read("system.truncation", p.truncation, 1);
  for (std::size_t m = 0; m < 2; ++m) {
    const std::string k = "system.mode" + std::to_string(m + 1) + "_";
    r.read(k + "omega", p.modes[m].omega, 0.0);
    r.read(k + "gamma", p.modes[m].gamma, 0.0);
    r.read(k + "pump", p.modes[m].pump, 0.0);
  }
  for (std::size_t n = 0; n < 2; ++n) {
    const std::string k = "system.qd" + std::to_string(n + 1) + "_";
    r.read(k + "omega", p.dots[n].omega, 0.0);
    r.read(k + "gamma", p.dots[n].gamma, 0.0);
    r.read(k + "gamma_d", p.dots[n].gamma_d, 0.0);
  }
  for (std::size_t m = 0; m < 2; ++m) {
    for (std::size_t n = 0; n < 2; ++n) {
      const std::string k = "system.g_m" + std::to_string(m + 1) + "_qd" + std::to_string(n + 1);
      double re = p.coupling[m][n].real();
      double im = p.coupling[m][n].imag();
      r.read(k + "_re", re);
      r.read(k + "_im", im);
      p.coupling[m][n] = Complex(re, im);
    }
  }
}

inline std::vector<std::size_t> parse_cutoffs(const Reader& r, const std::string& path, const std::string& text) {
  std::vector<std::size_t> out;
  for (const auto& item : split(text, ',')) {
    if (!item.empty()) out.push_back(r.count(path, item, 1));
  }
  if (out.empty()) r.fail(path, "expected a comma-separated list of cutoffs");
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (out[i] <= out[i - 1]) r.fail(path, "cutoffs must be strictly ascending");
  }
  return out;
}

inline std::vector<std::pair<double, double>> parse_linewidths(const Reader& r, const std::string& path,
                                                               const std::string& text) {
  std::vector<std::pair<double, double>> out;
  for (const auto& item : split(text, ',')) {
    if (item.empty()) continue;
    const auto parts = split(item, ':');
    if (parts.size() != 2) r.fail(path, "expected pairs 'gamma1:gamma2', got '" + item + "'");
    const double g1 = r.number(path, parts[0]);
    const double g2 = r.number(path, parts[1]);
    if (g1 < 0.0 || g2 < 0.0) r.fail(path, "linewidths must be non-negative");
    out.emplace_back(g1, g2);
  }
  return out;
}

inline GridSpec default_grid(SweepKind kind, const SystemParams& p) {
  switch (kind) {
    case SweepKind::phase_detuning: {
      const double g = std::abs(p.coupling[0][0]);
      return {-3.0 * g, 3.0 * g, 121};
    }
    case SweepKind::detuning: return {-50.0, 50.0, 101};
    case SweepKind::dephasing: return {0.0, 5.0, 51};
    case SweepKind::splitting: return {0.0, 5000.0, 51};
  }
  return {};
}

}  // namespace detail

/// Parse sectioned key-value text into a fully resolved configuration.
inline RunConfig parse_config(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(e.message(), e.line());
  }
  const auto lines = detail::key_lines(text);
  detail::check_keys(tree, lines);
  const detail::Reader r(tree, lines);

  RunConfig c;
  std::vector<std::string> missing;
  if (!r.has("command")) missing.push_back("command");
  const bool has_preset = r.has("preset");
  if (!has_preset) {
    for (const auto& k : detail::required_system_keys()) {
      if (!r.has("system." + k)) missing.push_back("system." + k);
    }
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    throw ConfigError("missing required keys: " + list + (has_preset ? "" : " (or set 'preset')"));
  }
  r.read("command", c.command, detail::kCommands);

  if (has_preset) {
    c.preset = *r.raw("preset");
    try {
      c.params = preset_params(c.preset);
    } catch (const LookupError&) {
      std::string names;
      for (const auto& n : preset_names()) names += (names.empty() ? "" : ", ") + n;
      r.fail("preset", "unknown preset '" + c.preset + "' (expected one of: " + names + ")");
    }
  } else {
    c.params = SystemParams{};
    c.params.drive = DriveParams{};
    c.params.drive.amplitude = 1.0;
    c.params.drive.phase1 = std::numbers::pi;
  }
  detail::read_system(r, c.params);
  r.read("drive.amplitude", c.params.drive.amplitude, 0.0);
  r.read("drive.phase1", c.params.drive.phase1);
  r.read("drive.phase2", c.params.drive.phase2);
  const auto detuning = r.raw("drive.detuning");
  if (detuning && *detuning != "dark") {
    c.params.drive.detuning = r.number("drive.detuning", *detuning);
  } else {
    try {
      c.params.drive.detuning = identify_dark_state(c.params).energy;
    } catch (const DomainError& e) {
      throw ConfigError(std::string("drive.detuning = dark: ") + e.what());
    }
  }
  try {
    c.params.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("invalid system: ") + e.what());
  }

  r.read("sweep.kind", c.sweep.kind, detail::kSweepKinds);
  c.sweep.grid = detail::default_grid(c.sweep.kind, c.params);
  r.read("sweep.min", c.sweep.grid.min);
  r.read("sweep.max", c.sweep.grid.max);
  r.read("sweep.points", c.sweep.grid.points, 1);
  r.read("sweep.phi_min", c.sweep.phi.min);
  r.read("sweep.phi_max", c.sweep.phi.max);
  r.read("sweep.phi_points", c.sweep.phi.points, 1);
  r.read_list("sweep.qd_gammas", c.sweep.qd_gammas);
  if (c.sweep.qd_gammas.empty()) r.fail("sweep.qd_gammas", "expected at least one rate");
  for (double g : c.sweep.qd_gammas) {
    if (g < 0.0) r.fail("sweep.qd_gammas", "rates must be non-negative");
  }
  if (auto s = r.raw("sweep.linewidths")) c.sweep.linewidths = detail::parse_linewidths(r, "sweep.linewidths", *s);
  r.read("sweep.allow_failures", c.sweep.allow_failures);

  r.read("dynamics.initial", c.dynamics.initial, detail::kInitialStates);
  r.read("dynamics.horizon", c.dynamics.horizon);
  if (!(c.dynamics.horizon > 0.0)) r.fail("dynamics.horizon", "must be positive");
  r.read("dynamics.samples", c.dynamics.samples, 2);
  if (auto s = r.raw("dynamics.tau")) {
    if (*s == "auto") {
      c.dynamics.tau.reset();
    } else {
      c.dynamics.tau = r.number("dynamics.tau", *s);
      if (!(*c.dynamics.tau > 0.0 && *c.dynamics.tau < c.dynamics.horizon)) {
        r.fail("dynamics.tau", "must lie in (0, horizon)");
      }
    }
  }
  r.read("dynamics.initial_detuning", c.dynamics.initial_detuning);

  if (auto s = r.raw("convergence.cutoffs")) c.convergence.cutoffs = detail::parse_cutoffs(r, "convergence.cutoffs", *s);
  r.read("convergence.tolerance", c.convergence.tolerance, 0.0);
  if (auto s = r.raw("convergence.observable")) {
    static const std::set<std::string> allowed = {"negativity", "pop_qd1", "pop_qd2", "pop_m1", "pop_m2"};
    if (!allowed.contains(*s)) {
      r.fail("convergence.observable", "unknown observable '" + *s + "' (expected negativity or pop_*)");
    }
    c.convergence.observable = *s;
  }

  if (auto s = r.raw("output.directory")) c.output.directory = *s;
  if (auto s = r.raw("output.name")) c.output.name = *s;
  if (c.output.name.empty()) c.output.name = std::string(to_string(c.command));

  auto& np = c.policy;
  r.read("numeric.algebraic_tol", np.algebraic_tol, 0.0);
  r.read("numeric.positivity_slack", np.positivity_slack, 0.0);
  r.read("numeric.eigen_noise_floor", np.eigen_noise_floor, 0.0);
  r.read("numeric.steady_residual", np.steady_residual, 0.0);
  r.read("numeric.degeneracy_ratio", np.degeneracy_ratio, 0.0);
  r.read("numeric.integrator_rtol", np.integrator_rtol, 0.0);
  r.read("numeric.integrator_atol", np.integrator_atol, 0.0);
  r.read("numeric.trajectory_trace_drift", np.trajectory_trace_drift, 0.0);
  r.read("numeric.trajectory_positivity_slack", np.trajectory_positivity_slack, 0.0);
  return c;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

/// Shortest text that reads back to the same double.
inline std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

/// Fully resolved configuration as text; `parse_config` reproduces it exactly.
inline std::string serialize_config(const RunConfig& c) {
  std::ostringstream o;
  const auto num = [](double v) { return format_number(v); };
  o << "command = " << to_string(c.command) << "\n";
  if (!c.preset.empty()) o << "preset = " << c.preset << "\n";

  const auto& p = c.params;
  o << "\n[system]\ntruncation = " << p.truncation << "\n";
  for (std::size_t m = 0; m < 2; ++m) {
    const std::string k = "mode" + std::to_string(m + 1) + "_";
    o << k << "omega = " << num(p.modes[m].omega) << "\n"
      << k << "gamma = " << num(p.modes[m].gamma) << "\n"
      << k << "pump = " << num(p.modes[m].pump) << "\n";
  }
  for (std::size_t n = 0; n < 2; ++n) {
    const std::string k = "qd" + std::to_string(n + 1) + "_";
    o << k << "omega = " << num(p.dots[n].omega) << "\n"
      << k << "gamma = " << num(p.dots[n].gamma) << "\n"
      << k << "gamma_d = " << num(p.dots[n].gamma_d) << "\n";
  }
  for (std::size_t m = 0; m < 2; ++m) {
    for (std::size_t n = 0; n < 2; ++n) {
      const std::string k = "g_m" + std::to_string(m + 1) + "_qd" + std::to_string(n + 1);
      o << k << "_re = " << num(p.coupling[m][n].real()) << "\n" << k << "_im = " << num(p.coupling[m][n].imag()) << "\n";
    }
  }
  o << "\n[drive]\namplitude = " << num(p.drive.amplitude) << "\nphase1 = " << num(p.drive.phase1)
    << "\nphase2 = " << num(p.drive.phase2) << "\ndetuning = " << num(p.drive.detuning) << "\n";

  const auto& s = c.sweep;
  o << "\n[sweep]\nkind = " << to_string(s.kind) << "\nmin = " << num(s.grid.min) << "\nmax = " << num(s.grid.max)
    << "\npoints = " << s.grid.points << "\nphi_min = " << num(s.phi.min) << "\nphi_max = " << num(s.phi.max)
    << "\nphi_points = " << s.phi.points << "\nqd_gammas = ";
  for (std::size_t i = 0; i < s.qd_gammas.size(); ++i) o << (i ? ", " : "") << num(s.qd_gammas[i]);
  o << "\n";
  if (!s.linewidths.empty()) {
    o << "linewidths = ";
    for (std::size_t i = 0; i < s.linewidths.size(); ++i) {
      o << (i ? ", " : "") << num(s.linewidths[i].first) << ":" << num(s.linewidths[i].second);
    }
    o << "\n";
  }
  o << "allow_failures = " << (s.allow_failures ? "true" : "false") << "\n";

  const auto& d = c.dynamics;
  o << "\n[dynamics]\ninitial = " << to_string(d.initial) << "\nhorizon = " << num(d.horizon)
    << "\nsamples = " << d.samples << "\ntau = " << (d.tau ? num(*d.tau) : std::string("auto"))
    << "\ninitial_detuning = " << num(d.initial_detuning) << "\n";

  o << "\n[convergence]\ncutoffs = ";
  for (std::size_t i = 0; i < c.convergence.cutoffs.size(); ++i) o << (i ? ", " : "") << c.convergence.cutoffs[i];
  o << "\ntolerance = " << num(c.convergence.tolerance) << "\nobservable = " << c.convergence.observable << "\n";

  o << "\n[output]\ndirectory = " << c.output.directory << "\nname = " << c.output.name << "\n";

  const auto& np = c.policy;
  o << "\n[numeric]\nalgebraic_tol = " << num(np.algebraic_tol) << "\npositivity_slack = " << num(np.positivity_slack)
    << "\neigen_noise_floor = " << num(np.eigen_noise_floor) << "\nsteady_residual = " << num(np.steady_residual)
    << "\ndegeneracy_ratio = " << num(np.degeneracy_ratio) << "\nintegrator_rtol = " << num(np.integrator_rtol)
    << "\nintegrator_atol = " << num(np.integrator_atol)
    << "\ntrajectory_trace_drift = " << num(np.trajectory_trace_drift)
    << "\ntrajectory_positivity_slack = " << num(np.trajectory_positivity_slack) << "\n";
  return o.str();
}

}  // namespace qdent
