#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "qdent/entanglement.hpp"
#include "qdent/errors.hpp"
#include "qdent/model.hpp"
#include "test_support.hpp"

using namespace qdent;
using qdent::testing::Gen;
using qdent::testing::kron;

namespace {

const std::vector<BellKind> kAllBell = {BellKind::phi_plus, BellKind::phi_minus, BellKind::psi_plus,
                                        BellKind::psi_minus};

Matrix werner(double p) {
  return p * bell_state(BellKind::psi_minus).matrix() + (1.0 - p) * Matrix::Identity(4, 4) / 4.0;
}

/// Coefficients of det(λI − M) for a 4×4 matrix via Faddeev–LeVerrier.
std::vector<Complex> characteristic_coefficients(const Matrix& m) {
  std::vector<Complex> c(5);
  c[4] = 1.0;
  Matrix mk = Matrix::Zero(4, 4);
  for (int k = 1; k <= 4; ++k) {
    mk = m * mk + c[static_cast<std::size_t>(5 - k)] * Matrix::Identity(4, 4);
    c[static_cast<std::size_t>(4 - k)] = -(m * mk).trace() / static_cast<double>(k);
  }
  return c;  // c[0] + c[1]λ + ... + c[4]λ⁴
}

}  // namespace

TEST(BellStates, NegativityIsOneHalf) {
  for (auto kind : kAllBell) EXPECT_NEAR(negativity(bell_state(kind)), 0.5, 1e-10);
}

TEST(BellStates, PartialTransposeSpectrum) {
  for (auto kind : kAllBell) {
    const Eigen::VectorXd ev = hermitian_eigenvalues(partial_transpose_first(bell_state(kind)));
    EXPECT_NEAR(ev(0), -0.5, 1e-10);
    for (int k = 1; k < 4; ++k) EXPECT_NEAR(ev(k), 0.5, 1e-10);
  }
}

TEST(BellStates, PsiMinusMatrixElements) {
  const Matrix m = bell_state(BellKind::psi_minus).matrix();
  EXPECT_NEAR(m(1, 1).real(), 0.5, 1e-15);
  EXPECT_NEAR(m(2, 2).real(), 0.5, 1e-15);
  EXPECT_NEAR(m(1, 2).real(), -0.5, 1e-15);
  EXPECT_NEAR(m(2, 1).real(), -0.5, 1e-15);
  EXPECT_NEAR(m.cwiseAbs().sum(), 2.0, 1e-15);
}

TEST(BellStates, PureAndLocallyMaximallyMixed) {
  for (auto kind : kAllBell) {
    const auto& rho = bell_state(kind);
    EXPECT_NEAR((rho.matrix() * rho.matrix()).trace().real(), 1.0, 1e-14);
    for (std::size_t keep = 0; keep < 2; ++keep) {
      const Matrix r = partial_trace(rho.state(), {keep}).matrix();
      EXPECT_LT(max_abs(r - Matrix::Identity(2, 2) / 2.0), 1e-15);
    }
  }
}

TEST(PartialTranspose, PhiBlockForm) {
  const Matrix pt_plus = partial_transpose_first(bell_state(BellKind::phi_plus));
  const Matrix pt_minus = partial_transpose_first(bell_state(BellKind::phi_minus));
  Matrix expected = Matrix::Zero(4, 4);
  expected(0, 0) = expected(3, 3) = 0.5;
  expected(1, 2) = expected(2, 1) = 0.5;
  EXPECT_LT(max_abs(pt_plus - expected), 1e-15);
  expected(1, 2) = expected(2, 1) = -0.5;
  EXPECT_LT(max_abs(pt_minus - expected), 1e-15);
}

TEST(PartialTranspose, ProductStateTransposesFirstFactor) {
  Gen gen(1);
  const Matrix a = gen.density(2), b = gen.density(2);
  const Matrix pt = partial_transpose_first(TwoQubitState(kron(a, b)));
  EXPECT_LT(max_abs(pt - kron(a.transpose(), b)), 1e-15);
  const Eigen::VectorXd e0 = hermitian_eigenvalues(kron(a, b));
  EXPECT_LT((hermitian_eigenvalues(pt) - e0).norm(), 1e-12);
}

TEST(PartialTranspose, Involution) {
  Gen gen(2);
  const Matrix rho = gen.density(4);
  EXPECT_EQ(partial_transpose_first(partial_transpose_first(rho)), rho);
  EXPECT_EQ(partial_transpose_second(partial_transpose_second(rho)), rho);
}

TEST(PartialTranspose, HermitianWithUnitTrace) {
  Gen gen(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix pt = partial_transpose_first(TwoQubitState(gen.density(4)));
    EXPECT_LT(max_abs(pt - pt.adjoint()), 1e-15);
    EXPECT_NEAR(pt.trace().real(), 1.0, 1e-14);
    EXPECT_NO_THROW(hermitian_eigenvalues(pt));
  }
}

TEST(Negativity, ProductStatesAreZero) {
  Gen gen(4);
  for (int trial = 0; trial < 20; ++trial) {
    EXPECT_EQ(negativity(TwoQubitState(kron(gen.density(2), gen.density(2)))), 0.0);
  }
}

TEST(Negativity, WernerState) {
  EXPECT_NEAR(negativity(TwoQubitState(werner(2.0 / 3.0))), 0.25, 1e-12);
  for (double p : {0.0, 0.2, 1.0 / 3.0, 0.5, 0.9, 1.0}) {
    const Eigen::VectorXd ev = hermitian_eigenvalues(partial_transpose_first(werner(p)));
    double direct = 0.0;
    for (Eigen::Index k = 0; k < 4; ++k) direct += std::min(ev(k), 0.0);
    EXPECT_NEAR(negativity(TwoQubitState(werner(p))), std::max(0.0, (3 * p - 1) / 4), 1e-12) << "p = " << p;
    EXPECT_NEAR(-direct, std::max(0.0, (3 * p - 1) / 4), 1e-12);
  }
}

TEST(Negativity, NoiseFloorSuppressesRoundoff) {
  // ρ^{T1} has a single eigenvalue of −2ε.
  auto state = [](double eps) {
    Matrix m = Matrix::Zero(4, 4);
    m(0, 0) = m(3, 3) = m(0, 3) = m(3, 0) = 0.25 + eps;
    m(1, 1) = m(2, 2) = 0.25 - eps;
    return TwoQubitState(m);
  };
  EXPECT_EQ(negativity(state(2.5e-13)), 0.0);
  EXPECT_NEAR(negativity(state(5e-9)), 1e-8, 1e-14);
}

TEST(Negativity, SymmetricUnderTransposeChoice) {
  Gen gen(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix rho = gen.density(4);
    const Eigen::VectorXd e1 = hermitian_eigenvalues(partial_transpose_first(rho));
    const Eigen::VectorXd e2 = hermitian_eigenvalues(partial_transpose_second(rho));
    EXPECT_LT((e1 - e2).norm(), 1e-12);
  }
}

TEST(NegativityProperty, InvariantUnderLocalUnitaries) {
  Gen gen(6);
  for (int trial = 0; trial < 50; ++trial) {
    Matrix rho = gen.density(4);
    if (trial % 2 == 0) {
      const Vector psi = gen.state_vector(4);
      rho = 0.6 * psi * psi.adjoint() + 0.4 * rho;
    }
    const Matrix u = kron(gen.unitary(2), gen.unitary(2));
    const Matrix rotated = u * rho * u.adjoint();
    const double n0 = negativity(TwoQubitState(rho));
    const double n1 = negativity(TwoQubitState(Matrix(0.5 * (rotated + rotated.adjoint()))));
    EXPECT_NEAR(n0, n1, 1e-10);
  }
}

TEST(NegativityProperty, BoundedAndMaximalOnlyForBellLikeStates) {
  Gen gen(7);
  for (int trial = 0; trial < 100; ++trial) {
    Matrix rho = gen.density(4);
    if (trial % 2 == 0) {
      const Vector psi = gen.state_vector(4);
      rho = psi * psi.adjoint();
    }
    const Matrix r = 0.5 * (rho + rho.adjoint());
    const double n = negativity(TwoQubitState(Matrix(r / r.trace().real())));
    EXPECT_GE(n, 0.0);
    EXPECT_LE(n, 0.5 + 1e-12);
    EXPECT_LT(n, 0.5 - 1e-6);
  }
  // Local rotations of Bell states stay maximal.
  for (auto kind : kAllBell) {
    const Matrix u = kron(gen.unitary(2), gen.unitary(2));
    const Matrix m = u * bell_state(kind).matrix() * u.adjoint();
    EXPECT_NEAR(negativity(TwoQubitState(Matrix(0.5 * (m + m.adjoint())))), 0.5, 1e-10);
  }
}

TEST(NegativityProperty, SeparableMixturesAreZero) {
  Gen gen(8);
  for (int trial = 0; trial < 50; ++trial) {
    Matrix rho = Matrix::Zero(4, 4);
    double total = 0.0;
    for (int k = 0; k < 4; ++k) {
      const double w = gen.uniform(0.1, 1.0);
      rho += w * kron(gen.density(2), gen.density(2));
      total += w;
    }
    rho /= total;
    EXPECT_EQ(negativity(TwoQubitState(Matrix(0.5 * (rho + rho.adjoint())))), 0.0);
  }
}

TEST(NegativityProperty, BellCharacteristicPolynomial) {
  // (0.5 − λ)³(0.5 + λ) = λ⁴ − λ³ + 0·λ² + 0.25λ − 0.0625
  const std::vector<double> expected = {-0.0625, 0.25, 0.0, -1.0, 1.0};
  for (auto kind : kAllBell) {
    const auto c = characteristic_coefficients(partial_transpose_first(bell_state(kind)));
    for (std::size_t k = 0; k < 5; ++k) {
      EXPECT_NEAR(c[k].real(), expected[k], 1e-12) << "coefficient " << k;
      EXPECT_NEAR(c[k].imag(), 0.0, 1e-12);
    }
  }
}

TEST(QdNegativity, Composition) {
  const auto s = CompositeSpace::qd_dimer(1);
  Vector psi = Vector::Zero(16);
  const std::vector<std::size_t> d01{0, 1, 0, 0}, d10{1, 0, 0, 0};
  psi(static_cast<Eigen::Index>(s.index_of(d01))) = 1.0 / std::sqrt(2.0);
  psi(static_cast<Eigen::Index>(s.index_of(d10))) = -1.0 / std::sqrt(2.0);
  EXPECT_NEAR(qd_negativity(DensityMatrix::pure(s, psi)), 0.5, 1e-12);

  const std::vector<std::size_t> vacuum{0, 0, 0, 0}, photon{0, 0, 1, 0};
  EXPECT_EQ(qd_negativity(DensityMatrix::basis_state(s, vacuum)), 0.0);
  EXPECT_EQ(qd_negativity(DensityMatrix::basis_state(s, photon)), 0.0);
}

TEST(QdNegativity, RequiresDimerSpace) {
  EXPECT_THROW(qd_negativity(DensityMatrix::maximally_mixed(TwoQubitState::space())), DomainError);
}

TEST(TwoQubitState, RejectsInvalidInput) {
  EXPECT_THROW(TwoQubitState(Matrix(Matrix::Identity(4, 4))), DomainError);
  EXPECT_THROW(TwoQubitState(Matrix(Matrix::Identity(3, 3) / 3.0)), DomainError);
  EXPECT_THROW(TwoQubitState(DensityMatrix::maximally_mixed(CompositeSpace::qd_dimer(1))), DomainError);
}
