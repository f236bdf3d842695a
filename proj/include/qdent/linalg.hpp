#pragma once

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "qdent/errors.hpp"
#include "qdent/hilbert.hpp"
#include "qdent/numeric_policy.hpp"

namespace qdent {

struct HermitianEigensystem {
  Eigen::VectorXd values;  // ascending
  Matrix vectors;          // columns, matching `values`
};

namespace detail {
inline void require_hermitian(const Matrix& m, double tol, const char* who) {
  if (m.rows() != m.cols()) throw DomainError(std::string(who) + ": matrix is not square");
  const double err = max_abs(m - m.adjoint());
  if (err > tol) throw DomainError(std::string(who) + ": matrix is not Hermitian (error " + std::to_string(err) + ")");
}
}  // namespace detail

inline HermitianEigensystem hermitian_eigensystem(const Matrix& m, const NumericPolicy& policy = default_policy()) {
  detail::require_hermitian(m, policy.algebraic_tol, "hermitian_eigensystem");
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()));
  return {es.eigenvalues(), es.eigenvectors()};
}

inline Eigen::VectorXd hermitian_eigenvalues(const Matrix& m, const NumericPolicy& policy = default_policy()) {
  detail::require_hermitian(m, policy.algebraic_tol, "hermitian_eigenvalues");
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

/// Full complex spectrum of a general square matrix (unordered).
inline Vector general_eigenvalues(const Matrix& m) {
  if (m.rows() != m.cols()) throw DomainError("general_eigenvalues: matrix is not square");
  Eigen::ComplexEigenSolver<Matrix> es(m, false);
  if (es.info() != Eigen::Success) throw SolverError("general_eigenvalues: QR iteration did not converge", 0.0);
  return es.eigenvalues();
}

/// Dense LU solve with a reciprocal-condition check and a backward-error bound
/// ‖Ax − b‖ ≤ tol·(‖A‖‖x‖ + ‖b‖).
inline Vector solve_linear(const Matrix& a, const Vector& b, const NumericPolicy& policy = default_policy()) {
  if (a.rows() != a.cols()) throw DomainError("solve_linear: matrix is not square");
  if (a.rows() != b.size()) throw DomainError("solve_linear: right-hand side has wrong length");
  Eigen::PartialPivLU<Matrix> lu(a);
  const bool zero_pivot = a.rows() > 0 && lu.matrixLU().diagonal().cwiseAbs().minCoeff() == 0.0;
  const double rcond = zero_pivot ? 0.0 : lu.rcond();
  if (!(rcond > std::numeric_limits<double>::epsilon())) {
    throw SolverError("solve_linear: matrix is singular to working precision", rcond > 0 ? 1.0 / rcond : INFINITY);
  }
  Vector x = lu.solve(b);
  const double anorm = a.cwiseAbs().colwise().sum().maxCoeff();
  const double bound = policy.algebraic_tol * (anorm * x.lpNorm<1>() + b.lpNorm<1>());
  if ((a * x - b).lpNorm<1>() > bound || !x.allFinite()) {
    throw SolverError("solve_linear: residual bound violated", x.allFinite() ? 1.0 / rcond : INFINITY);
  }
  return x;
}

}  // namespace qdent
