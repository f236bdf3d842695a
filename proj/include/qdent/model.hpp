#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "qdent/errors.hpp"
#include "qdent/hilbert.hpp"
#include "qdent/linalg.hpp"
#include "qdent/units.hpp"

namespace qdent {

// Subsystem positions in the (QD1, QD2, mode1, mode2) basis.
inline constexpr std::size_t kDot1 = 0;
inline constexpr std::size_t kDot2 = 1;
inline constexpr std::size_t kMode1 = 2;
inline constexpr std::size_t kMode2 = 3;

inline constexpr std::size_t dot_position(std::size_t dot) { return kDot1 + dot; }
inline constexpr std::size_t mode_position(std::size_t mode) { return kMode1 + mode; }

/// Photonic normal mode: energy, linewidth and incoherent pump rate, all in μeV.
struct ModeParams {
  double omega = 0.0;
  double gamma = 0.0;
  double pump = 0.0;

  friend bool operator==(const ModeParams&, const ModeParams&) = default;
};

/// Quantum-dot exciton: energy, radiative decay and pure dephasing, in μeV.
struct QDParams {
  double omega = 0.0;
  double gamma = 0.0;
  double gamma_d = 0.0;

  friend bool operator==(const QDParams&, const QDParams&) = default;
};

/// Coherent drive Ω_n = amplitude·e^{iφ_n} at ω_p = ω₁ + detuning.
struct DriveParams {
  double amplitude = 0.0;
  double phase1 = 0.0;
  double phase2 = 0.0;
  double detuning = 0.0;

  friend bool operator==(const DriveParams&, const DriveParams&) = default;
};

/// coupling[m][n] = ħg_m^(n) in μeV, mode m to dot n.
using CouplingMatrix = std::array<std::array<Complex, 2>, 2>;

struct SystemParams {
  std::array<ModeParams, 2> modes{};
  std::array<QDParams, 2> dots{};
  CouplingMatrix coupling{};
  DriveParams drive{};
  std::size_t truncation = 1;

  double pump_frequency() const { return modes[0].omega + drive.detuning; }
  double splitting() const { return modes[1].omega - modes[0].omega; }

  Complex rabi(std::size_t dot) const {
    const double phase = dot == 0 ? drive.phase1 : drive.phase2;
    return std::polar(drive.amplitude, phase);
  }

  CompositeSpace space() const { return CompositeSpace::qd_dimer(truncation); }

  void validate() const {
    auto finite = [](double x) { return std::isfinite(x); };
    if (truncation < 1) throw DomainError("truncation must be at least 1");
    for (std::size_t m = 0; m < 2; ++m) {
      const auto& mode = modes[m];
      if (!finite(mode.omega) || !finite(mode.gamma) || !finite(mode.pump)) throw DomainError("non-finite mode parameter");
      if (mode.gamma < 0.0) throw DomainError("mode linewidth must be non-negative");
      if (mode.pump < 0.0) throw DomainError("mode pump rate must be non-negative");
    }
    for (const auto& dot : dots) {
      if (!finite(dot.omega) || !finite(dot.gamma) || !finite(dot.gamma_d)) throw DomainError("non-finite dot parameter");
      if (dot.gamma < 0.0) throw DomainError("dot decay rate must be non-negative");
      if (dot.gamma_d < 0.0) throw DomainError("dot dephasing rate must be non-negative");
    }
    for (const auto& row : coupling) {
      for (const auto& g : row) {
        if (!finite(g.real()) || !finite(g.imag())) throw DomainError("non-finite coupling");
      }
    }
    if (!finite(drive.amplitude) || drive.amplitude < 0.0) throw DomainError("drive amplitude must be non-negative");
    if (!finite(drive.phase1) || !finite(drive.phase2) || !finite(drive.detuning)) {
      throw DomainError("non-finite drive parameter");
    }
  }

  friend bool operator==(const SystemParams&, const SystemParams&) = default;
};

/// ħg = √(2π ħω₀ d²) E_y, with ħω₀ in eV, d² in eV·nm³ and E_y in nm^(-3/2).
/// Returns μeV.
inline double coupling_from_field(double omega0_ev, double dipole_sq, double field) {
  if (!(omega0_ev > 0.0)) throw DomainError("coupling_from_field: exciton energy must be positive");
  if (!(dipole_sq >= 0.0)) throw DomainError("coupling_from_field: squared dipole must be non-negative");
  return std::sqrt(2.0 * std::numbers::pi * omega0_ev * dipole_sq) * field * units::kMicroEvPerEv;
}

namespace detail {

inline void require_dimer_space(const SystemParams& params, const CompositeSpace& space) {
  if (!(space == params.space())) {
    throw DomainError("space does not match (qubit, qubit, boson, boson) at truncation " +
                      std::to_string(params.truncation));
  }
}

struct DimerOperators {
  std::array<Operator, 2> sm;  // σ⁻ per dot
  std::array<Operator, 2> a;   // a per mode
};

inline DimerOperators dimer_operators(const CompositeSpace& space) {
  return {{qubit_lowering(space, kDot1), qubit_lowering(space, kDot2)},
          {boson_annihilation(space, kMode1), boson_annihilation(space, kMode2)}};
}

// Everything in H except the drive. Bare frequencies enter as (ω − ω₁ − shift).
inline Operator undriven_hamiltonian(const SystemParams& p, const CompositeSpace& space, double mode_shift,
                                     double dot_shift) {
  const auto ops = dimer_operators(space);
  Operator h = Operator::zero(space);
  for (std::size_t m = 0; m < 2; ++m) {
    const double wm = (p.modes[m].omega - p.modes[0].omega) - mode_shift;
    h += Complex(wm) * boson_number(space, mode_position(m));
  }
  for (std::size_t n = 0; n < 2; ++n) {
    const double wn = (p.dots[n].omega - p.modes[0].omega) - dot_shift;
    h += Complex(wn) * (ops.sm[n].adjoint() * ops.sm[n]);
  }
  for (std::size_t m = 0; m < 2; ++m) {
    for (std::size_t n = 0; n < 2; ++n) {
      const Complex g = p.coupling[m][n];
      if (g == Complex(0.0, 0.0)) continue;
      h += std::conj(g) * (ops.a[m].adjoint() * ops.sm[n]);
      h += g * (ops.a[m] * ops.sm[n].adjoint());
    }
  }
  return h;
}

}  // namespace detail

/// Total excitation number Σ a†a + Σ σ⁺σ⁻.
inline Operator excitation_number(const CompositeSpace& space) {
  const auto ops = detail::dimer_operators(space);
  Operator n = Operator::zero(space);
  for (std::size_t m = 0; m < 2; ++m) n += boson_number(space, mode_position(m));
  for (const auto& s : ops.sm) n += s.adjoint() * s;
  return n;
}

/// Rotating-frame Hamiltonian: bare frequencies shifted by −ω_p, time-independent drive.
inline Operator build_effective_hamiltonian(const SystemParams& params, const CompositeSpace& space) {
  params.validate();
  detail::require_dimer_space(params, space);
  const double delta = params.drive.detuning;
  Operator h = detail::undriven_hamiltonian(params, space, delta, delta);
  const auto ops = detail::dimer_operators(space);
  for (std::size_t n = 0; n < 2; ++n) {
    const Complex omega = params.rabi(n);
    h += omega * ops.sm[n].adjoint();
    h += std::conj(omega) * ops.sm[n];
  }
  return h;
}

/// Laboratory-frame Hamiltonian at time t (ps), drive phases e^{∓iω_p t/ħ}.
inline Operator build_lab_hamiltonian(const SystemParams& params, const CompositeSpace& space, double t) {
  params.validate();
  detail::require_dimer_space(params, space);
  Operator h = detail::undriven_hamiltonian(params, space, -params.modes[0].omega, -params.modes[0].omega);
  const auto ops = detail::dimer_operators(space);
  const Complex phase = std::polar(1.0, -params.pump_frequency() * t / units::kHbar);
  for (std::size_t n = 0; n < 2; ++n) {
    const Complex omega = params.rabi(n) * phase;
    h += omega * ops.sm[n].adjoint();
    h += std::conj(omega) * ops.sm[n];
  }
  return h;
}

/// R(t) = exp(iω_p t N̂/ħ). N̂ is diagonal in the Fock basis, so R is too.
inline Operator frame_rotation(const SystemParams& params, const CompositeSpace& space, double t) {
  const Operator n = excitation_number(space);
  Matrix r = Matrix::Zero(n.dim(), n.dim());
  const double w = params.pump_frequency() * t / units::kHbar;
  for (Eigen::Index i = 0; i < n.dim(); ++i) r(i, i) = std::polar(1.0, w * n.matrix()(i, i).real());
  return Operator(space, std::move(r));
}

struct DarkState {
  double energy = 0.0;           // relative to ω₁, μeV
  Eigen::Vector4cd amplitudes;   // (QD1, QD2, mode1, mode2)
  double photonic_weight = 0.0;
  Eigen::Vector4d spectrum;      // all single-excitation energies, ascending
};

/// Drive-free single-excitation block of the Hamiltonian in the basis
/// (QD1, QD2, mode1, mode2), energies relative to ω₁.
inline Eigen::Matrix4cd single_excitation_block(const SystemParams& p) {
  Eigen::Matrix4cd h = Eigen::Matrix4cd::Zero();
  const double w1 = p.modes[0].omega;
  h(0, 0) = p.dots[0].omega - w1;
  h(1, 1) = p.dots[1].omega - w1;
  h(2, 2) = 0.0;
  h(3, 3) = p.modes[1].omega - w1;
  for (int m = 0; m < 2; ++m) {
    for (int n = 0; n < 2; ++n) {
      const Complex g = p.coupling[static_cast<std::size_t>(m)][static_cast<std::size_t>(n)];
      h(2 + m, n) = std::conj(g);
      h(n, 2 + m) = g;
    }
  }
  return h;
}

/// Eigenstate of the single-excitation block with the smallest photonic weight.
/// Ties within 1e-12 go to the lower energy.
inline DarkState identify_dark_state(const SystemParams& params) {
  bool any = false;
  for (const auto& row : params.coupling) {
    for (const auto& g : row) any = any || std::abs(g) > 0.0;
  }
  if (!any) throw DomainError("identify_dark_state: all couplings vanish, no unique dark state");

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(single_excitation_block(params));
  DarkState best;
  best.spectrum = es.eigenvalues();
  int chosen = -1;
  double best_weight = INFINITY;
  for (int k = 0; k < 4; ++k) {
    const auto v = es.eigenvectors().col(k);
    const double w = std::norm(v(2)) + std::norm(v(3));
    if (w < best_weight - 1e-12) {
      best_weight = w;
      chosen = k;
    }
  }
  best.energy = es.eigenvalues()(chosen);
  best.amplitudes = es.eigenvectors().col(chosen);
  best.photonic_weight = best_weight;
  return best;
}

namespace detail {

inline SystemParams dimer30_template(double gamma1, double gamma2, double splitting) {
  constexpr double kOmega1 = 1.3e6;  // 1.3 eV
  constexpr double kG = 110.0;
  SystemParams p;
  p.modes[0] = {kOmega1, gamma1, 0.0};
  p.modes[1] = {kOmega1 + splitting, gamma2, 0.0};
  p.dots[0] = {kOmega1, 0.0, 0.0};
  p.dots[1] = {kOmega1, 0.0, 0.0};
  // Bonding mode couples with equal signs, antibonding with opposite signs.
  p.coupling = {{{Complex(kG), Complex(kG)}, {Complex(kG), Complex(-kG)}}};
  p.drive.amplitude = 1.0;
  p.drive.phase1 = std::numbers::pi;
  p.drive.phase2 = 0.0;
  p.truncation = 1;
  p.drive.detuning = identify_dark_state(p).energy;
  return p;
}

}  // namespace detail

inline std::vector<std::string> preset_names() { return {"dimer30_dc901", "dimer30_dc2252", "generic_weak_pump"}; }

/// Frozen parameter sets. All drive the dots at the dark-state frequency with
/// the bonding-mode phase difference π.
inline SystemParams preset_params(std::string_view name) {
  if (name == "dimer30_dc901") return detail::dimer30_template(67.0, 37.0, 5000.0);
  if (name == "dimer30_dc2252") return detail::dimer30_template(17.0, 16.0, 1000.0);
  if (name == "generic_weak_pump") {
    auto p = detail::dimer30_template(40.0, 40.0, 3000.0);
    p.drive.amplitude = 0.5;
    p.dots[0].gamma = p.dots[1].gamma = 0.66;
    return p;
  }
  throw LookupError("unknown preset '" + std::string(name) + "'");
}

}  // namespace qdent
