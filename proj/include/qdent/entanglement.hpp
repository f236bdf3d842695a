#pragma once

#include <cmath>
#include <numbers>
#include <string_view>

#include "qdent/errors.hpp"
#include "qdent/hilbert.hpp"
#include "qdent/linalg.hpp"

namespace qdent {

/// Two-qubit density matrix in the basis (|00⟩, |01⟩, |10⟩, |11⟩).
class TwoQubitState {
 public:
  explicit TwoQubitState(const Matrix& rho, const NumericPolicy& policy = default_policy())
      : state_(space(), rho, policy) {}
  explicit TwoQubitState(const DensityMatrix& rho) : state_(rho) {
    if (!(rho.space() == space())) throw DomainError("TwoQubitState: state is not on a (qubit, qubit) space");
  }

  static CompositeSpace space() { return CompositeSpace({SubsystemSpec::qubit(), SubsystemSpec::qubit()}); }

  const Matrix& matrix() const noexcept { return state_.matrix(); }
  const DensityMatrix& state() const noexcept { return state_; }

 private:
  DensityMatrix state_;
};

/// ⟨a₁a₂|ρ^{T1}|a₁'a₂'⟩ = ⟨a₁'a₂|ρ|a₁a₂'⟩.
inline Matrix partial_transpose_first(const Matrix& rho) {
  if (rho.rows() != 4 || rho.cols() != 4) throw DomainError("partial_transpose_first: expected a 4x4 matrix");
  Matrix out(4, 4);
  for (int a1 = 0; a1 < 2; ++a1)
    for (int a2 = 0; a2 < 2; ++a2)
      for (int b1 = 0; b1 < 2; ++b1)
        for (int b2 = 0; b2 < 2; ++b2) out(2 * a1 + a2, 2 * b1 + b2) = rho(2 * b1 + a2, 2 * a1 + b2);
  return out;
}

inline Matrix partial_transpose_first(const TwoQubitState& rho) { return partial_transpose_first(rho.matrix()); }

inline Matrix partial_transpose_second(const Matrix& rho) {
  if (rho.rows() != 4 || rho.cols() != 4) throw DomainError("partial_transpose_second: expected a 4x4 matrix");
  Matrix out(4, 4);
  for (int a1 = 0; a1 < 2; ++a1)
    for (int a2 = 0; a2 < 2; ++a2)
      for (int b1 = 0; b1 < 2; ++b1)
        for (int b2 = 0; b2 < 2; ++b2) out(2 * a1 + a2, 2 * b1 + b2) = rho(2 * a1 + b2, 2 * b1 + a2);
  return out;
}

/// |Σ negative eigenvalues of ρ^{T1}|; eigenvalues above −noise_floor count as zero.
inline double negativity(const TwoQubitState& rho, const NumericPolicy& policy = default_policy()) {
  const Eigen::VectorXd ev = hermitian_eigenvalues(partial_transpose_first(rho), policy);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < -policy.eigen_noise_floor) sum -= ev(i);
  }
  return sum;
}

enum class BellKind { phi_plus, phi_minus, psi_plus, psi_minus };

inline TwoQubitState bell_state(BellKind kind) {
  Vector psi = Vector::Zero(4);
  const double s = 1.0 / std::numbers::sqrt2;
  switch (kind) {
    case BellKind::phi_plus: psi << s, 0, 0, s; break;
    case BellKind::phi_minus: psi << s, 0, 0, -s; break;
    case BellKind::psi_plus: psi << 0, s, s, 0; break;
    case BellKind::psi_minus: psi << 0, s, -s, 0; break;
  }
  return TwoQubitState(Matrix(psi * psi.adjoint()));
}

/// Reduced (QD1, QD2) state of a full dimer state.
inline TwoQubitState reduced_qd_state(const DensityMatrix& rho_full, const NumericPolicy& policy = default_policy()) {
  if (!rho_full.space().is_qd_dimer()) throw DomainError("reduced_qd_state: space is not (qubit, qubit, boson, boson)");
  return TwoQubitState(partial_trace(rho_full, {0, 1}, policy));
}

inline double qd_negativity(const DensityMatrix& rho_full, const NumericPolicy& policy = default_policy()) {
  return negativity(reduced_qd_state(rho_full, policy), policy);
}

}  // namespace qdent
