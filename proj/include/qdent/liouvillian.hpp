#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Sparse>

#include "qdent/errors.hpp"
#include "qdent/hilbert.hpp"
#include "qdent/model.hpp"
#include "qdent/units.hpp"

namespace qdent {

using SparseMatrix = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;

// Density matrices are vectorised by stacking columns:
//   vec(ρ)[j·D + i] = ρ(i, j),   vec(AρB) = (Bᵀ ⊗ A) vec(ρ).

struct VectorizedState {
  CompositeSpace space;
  Vector data;
};

inline Vector vectorize(const Matrix& rho) {
  return Eigen::Map<const Vector>(rho.data(), rho.size());
}

inline VectorizedState vectorize(const DensityMatrix& rho) { return {rho.space(), vectorize(rho.matrix())}; }

inline Matrix devectorize(const Vector& v) {
  const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
  if (d * d != v.size()) {
    throw DomainError("devectorize: length " + std::to_string(v.size()) + " is not a perfect square");
  }
  return Eigen::Map<const Matrix>(v.data(), d, d);
}

/// Row vector ⟨⟨I| with tr(ρ) = ⟨⟨I|vec(ρ)⟩⟩.
inline Vector trace_functional(Eigen::Index dim) {
  Vector t = Vector::Zero(dim * dim);
  for (Eigen::Index k = 0; k < dim; ++k) t(k * dim + k) = 1.0;
  return t;
}

/// Linear map on column-stacked density matrices (dimension D² × D²).
class Superoperator {
 public:
  Superoperator() = default;
  Superoperator(CompositeSpace space, SparseMatrix matrix) : space_(std::move(space)), matrix_(std::move(matrix)) {
    const auto d = static_cast<Eigen::Index>(space_.total_dim());
    if (matrix_.rows() != d * d || matrix_.cols() != d * d) {
      throw DomainError("superoperator dimension does not match its space");
    }
    matrix_.makeCompressed();
  }

  static Superoperator zero(const CompositeSpace& space) {
    const auto d2 = static_cast<Eigen::Index>(space.total_dim() * space.total_dim());
    return Superoperator(space, SparseMatrix(d2, d2));
  }

  const CompositeSpace& space() const noexcept { return space_; }
  const SparseMatrix& matrix() const noexcept { return matrix_; }
  Eigen::Index dim() const noexcept { return matrix_.rows(); }
  Matrix dense() const { return Matrix(matrix_); }

  Vector apply(const Vector& v) const { return matrix_ * v; }
  Matrix apply(const Matrix& rho) const { return devectorize(matrix_ * vectorize(rho)); }

  Superoperator& operator+=(const Superoperator& o) {
    if (!(space_ == o.space_)) throw DomainError("superoperators live on different spaces");
    matrix_ += o.matrix_;
    matrix_.makeCompressed();
    return *this;
  }
  Superoperator& operator*=(Complex c) {
    matrix_ *= c;
    return *this;
  }
  friend Superoperator operator+(Superoperator a, const Superoperator& b) { return a += b; }
  friend Superoperator operator*(Complex c, Superoperator a) { return a *= c; }

 private:
  CompositeSpace space_;
  SparseMatrix matrix_;
};

namespace detail {

struct Entry {
  Eigen::Index row, col;
  Complex value;
};

inline std::vector<Entry> nonzeros(const Matrix& m) {
  std::vector<Entry> out;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (m(i, j) != Complex(0.0, 0.0)) out.push_back({i, j, m(i, j)});
    }
  }
  return out;
}

/// Triplets of c·(A ⊗ B), appended to `out`.
inline void append_kron(std::vector<Eigen::Triplet<Complex>>& out, const Matrix& a, const Matrix& b, Complex c) {
  const auto na = nonzeros(a);
  const auto nb = nonzeros(b);
  const Eigen::Index rb = b.rows();
  const Eigen::Index cb = b.cols();
  out.reserve(out.size() + na.size() * nb.size());
  for (const auto& ea : na) {
    for (const auto& eb : nb) {
      out.emplace_back(ea.row * rb + eb.row, ea.col * cb + eb.col, c * ea.value * eb.value);
    }
  }
}

inline Superoperator from_triplets(const CompositeSpace& space, const std::vector<Eigen::Triplet<Complex>>& t) {
  const auto d2 = static_cast<Eigen::Index>(space.total_dim() * space.total_dim());
  SparseMatrix m(d2, d2);
  m.setFromTriplets(t.begin(), t.end());
  m.prune(Complex(0.0, 0.0));
  return Superoperator(space, std::move(m));
}

}  // namespace detail

/// −i[H, ·] in vectorised form, in the energy units of H.
inline Superoperator commutator_generator(const Operator& h) {
  const Matrix id = Matrix::Identity(h.dim(), h.dim());
  std::vector<Eigen::Triplet<Complex>> t;
  detail::append_kron(t, id, h.matrix(), Complex(0.0, -1.0));
  detail::append_kron(t, h.matrix().transpose(), id, Complex(0.0, 1.0));
  return detail::from_triplets(h.space(), t);
}

/// rate·(CρC† − C†Cρ/2 − ρC†C/2). `rate` stays in μeV; conversion to ps⁻¹
/// happens once, in `generator`.
inline Superoperator dissipator(const Operator& jump, double rate) {
  if (!(rate >= 0.0)) throw DomainError("dissipator: rate must be non-negative");
  if (rate == 0.0) return Superoperator::zero(jump.space());
  const Matrix& c = jump.matrix();
  const Matrix cdc = c.adjoint() * c;
  const Matrix id = Matrix::Identity(c.rows(), c.cols());
  std::vector<Eigen::Triplet<Complex>> t;
  detail::append_kron(t, c.conjugate(), c, Complex(rate));
  detail::append_kron(t, id, cdc, Complex(-0.5 * rate));
  detail::append_kron(t, cdc.transpose(), id, Complex(-0.5 * rate));
  return detail::from_triplets(jump.space(), t);
}

/// Pure dephasing of dot `dot` with jump operator σ⁺σ⁻. Weighted so that the
/// exciton coherence ρ_eg decays at rate/ħ (populations untouched).
inline Superoperator dephasing_dissipator(std::size_t dot, double rate, const CompositeSpace& space) {
  if (!(rate >= 0.0)) throw DomainError("dephasing_dissipator: rate must be non-negative");
  if (dot > 1 || !space.is_qd_dimer()) throw DomainError("dephasing_dissipator: invalid dot index");
  const Operator sm = qubit_lowering(space, dot_position(dot));
  return dissipator(sm.adjoint() * sm, 2.0 * rate);
}

/// Incoherent pumping of normal mode `mode` (jump operator a†).
inline Superoperator incoherent_pump_dissipator(std::size_t mode, double rate, const CompositeSpace& space) {
  if (!(rate >= 0.0)) throw DomainError("incoherent_pump_dissipator: rate must be non-negative");
  if (mode > 1 || !space.is_qd_dimer()) throw DomainError("incoherent_pump_dissipator: invalid mode index");
  return dissipator(boson_annihilation(space, mode_position(mode)).adjoint(), rate);
}

/// Full generator in ps⁻¹: (−i[H, ·] + Σ D) / ħ with H and all rates in μeV.
inline Superoperator generator(const Operator& hamiltonian, const std::vector<Superoperator>& dissipators) {
  Superoperator l = commutator_generator(hamiltonian);
  for (const auto& d : dissipators) l += d;
  l *= Complex(1.0 / units::kHbar);
  return l;
}

/// All Lindblad channels of the dimer model: photon loss and incoherent
/// pumping of both modes, exciton decay and pure dephasing of both dots.
inline std::vector<Superoperator> model_dissipators(const SystemParams& params, const CompositeSpace& space) {
  std::vector<Superoperator> out;
  for (std::size_t m = 0; m < 2; ++m) {
    const auto& mode = params.modes[m];
    if (mode.gamma > 0.0) out.push_back(dissipator(boson_annihilation(space, mode_position(m)), mode.gamma));
    if (mode.pump > 0.0) out.push_back(incoherent_pump_dissipator(m, mode.pump, space));
  }
  for (std::size_t n = 0; n < 2; ++n) {
    const auto& dot = params.dots[n];
    if (dot.gamma > 0.0) out.push_back(dissipator(qubit_lowering(space, dot_position(n)), dot.gamma));
    if (dot.gamma_d > 0.0) out.push_back(dephasing_dissipator(n, dot.gamma_d, space));
  }
  return out;
}

inline Superoperator build_liouvillian(const SystemParams& params) {
  params.validate();
  const CompositeSpace space = params.space();
  return generator(build_effective_hamiltonian(params, space), model_dissipators(params, space));
}

}  // namespace qdent
