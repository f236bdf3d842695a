#pragma once

#include <algorithm>
#include <complex>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qdent/errors.hpp"
#include "qdent/numeric_policy.hpp"

namespace qdent {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

enum class SubsystemKind { qubit, boson };

/// One tensor factor. Qubits are ordered (ground, excited); bosons (0, 1, ..., dim-1).
struct SubsystemSpec {
  SubsystemKind kind = SubsystemKind::qubit;
  std::size_t dim = 2;

  static SubsystemSpec qubit() { return {SubsystemKind::qubit, 2}; }
  /// Fock space truncated at `cutoff` photons.
  static SubsystemSpec boson(std::size_t cutoff) {
    if (cutoff < 1) throw DomainError("boson cutoff must be at least 1");
    return {SubsystemKind::boson, cutoff + 1};
  }

  friend bool operator==(const SubsystemSpec&, const SubsystemSpec&) = default;
};

/// Ordered tensor product of subsystems. The first subsystem is the most
/// significant digit of the global basis index (Kronecker order).
class CompositeSpace {
 public:
  CompositeSpace() = default;

  explicit CompositeSpace(std::vector<SubsystemSpec> subsystems) : subsystems_(std::move(subsystems)) {
    if (subsystems_.empty()) throw DomainError("composite space needs at least one subsystem");
    total_dim_ = 1;
    for (const auto& s : subsystems_) {
      if (s.dim < 2) throw DomainError("subsystem dimension must be at least 2");
      if (s.kind == SubsystemKind::qubit && s.dim != 2) throw DomainError("qubit subsystem must have dim 2");
      total_dim_ *= s.dim;
    }
  }

  /// (QD1, QD2, mode1, mode2) with the given per-mode photon cutoff.
  static CompositeSpace qd_dimer(std::size_t cutoff) {
    return CompositeSpace({SubsystemSpec::qubit(), SubsystemSpec::qubit(), SubsystemSpec::boson(cutoff),
                           SubsystemSpec::boson(cutoff)});
  }

  std::size_t size() const noexcept { return subsystems_.size(); }
  std::size_t total_dim() const noexcept { return total_dim_; }
  const SubsystemSpec& operator[](std::size_t i) const { return subsystems_.at(i); }
  const std::vector<SubsystemSpec>& subsystems() const noexcept { return subsystems_; }

  std::vector<std::size_t> dims() const {
    std::vector<std::size_t> d;
    d.reserve(subsystems_.size());
    for (const auto& s : subsystems_) d.push_back(s.dim);
    return d;
  }

  /// Stride of subsystem i in the global index.
  std::size_t stride(std::size_t i) const {
    std::size_t s = 1;
    for (std::size_t k = i + 1; k < subsystems_.size(); ++k) s *= subsystems_[k].dim;
    return s;
  }

  std::size_t index_of(std::span<const std::size_t> digits) const {
    if (digits.size() != subsystems_.size()) throw DomainError("basis label has wrong length");
    std::size_t idx = 0;
    for (std::size_t k = 0; k < digits.size(); ++k) {
      if (digits[k] >= subsystems_[k].dim) throw DomainError("basis label out of range");
      idx = idx * subsystems_[k].dim + digits[k];
    }
    return idx;
  }

  bool is_qd_dimer() const {
    return subsystems_.size() == 4 && subsystems_[0].kind == SubsystemKind::qubit &&
           subsystems_[1].kind == SubsystemKind::qubit && subsystems_[2].kind == SubsystemKind::boson &&
           subsystems_[3].kind == SubsystemKind::boson;
  }

  friend bool operator==(const CompositeSpace&, const CompositeSpace&) = default;

 private:
  std::vector<SubsystemSpec> subsystems_;
  std::size_t total_dim_ = 0;
};

/// Square complex matrix acting on a CompositeSpace.
class Operator {
 public:
  Operator() = default;
  Operator(CompositeSpace space, Matrix matrix) : space_(std::move(space)), matrix_(std::move(matrix)) {
    const auto d = static_cast<Eigen::Index>(space_.total_dim());
    if (matrix_.rows() != d || matrix_.cols() != d) throw DomainError("operator dimension does not match its space");
  }

  static Operator identity(const CompositeSpace& space) {
    const auto d = static_cast<Eigen::Index>(space.total_dim());
    return Operator(space, Matrix::Identity(d, d));
  }
  static Operator zero(const CompositeSpace& space) {
    const auto d = static_cast<Eigen::Index>(space.total_dim());
    return Operator(space, Matrix::Zero(d, d));
  }

  const CompositeSpace& space() const noexcept { return space_; }
  const Matrix& matrix() const noexcept { return matrix_; }
  Eigen::Index dim() const noexcept { return matrix_.rows(); }

  Operator adjoint() const { return Operator(space_, matrix_.adjoint()); }

  Operator& operator+=(const Operator& o) {
    require_same_space(o);
    matrix_ += o.matrix_;
    return *this;
  }
  Operator& operator-=(const Operator& o) {
    require_same_space(o);
    matrix_ -= o.matrix_;
    return *this;
  }
  Operator& operator*=(Complex c) {
    matrix_ *= c;
    return *this;
  }

  friend Operator operator+(Operator a, const Operator& b) { return a += b; }
  friend Operator operator-(Operator a, const Operator& b) { return a -= b; }
  friend Operator operator*(Complex c, Operator a) { return a *= c; }
  friend Operator operator*(const Operator& a, const Operator& b) {
    a.require_same_space(b);
    return Operator(a.space_, a.matrix_ * b.matrix_);
  }

 private:
  void require_same_space(const Operator& o) const {
    if (!(space_ == o.space_)) throw DomainError("operators live on different spaces");
  }

  CompositeSpace space_;
  Matrix matrix_;
};

/// Result of checking the physical invariants of a candidate density matrix.
struct StateDiagnostics {
  double hermiticity_error = 0.0;  // max |ρ - ρ†|
  double trace_error = 0.0;        // |tr ρ - 1|
  double min_eigenvalue = 0.0;
};

inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline StateDiagnostics diagnose_state(const Matrix& rho) {
  StateDiagnostics d;
  d.hermiticity_error = max_abs(rho - rho.adjoint());
  d.trace_error = std::abs(rho.trace() - Complex(1.0, 0.0));
  const Matrix h = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  d.min_eigenvalue = es.eigenvalues().minCoeff();
  return d;
}

/// Density matrix: Hermitian, unit trace, positive semidefinite within the
/// policy tolerances. Validation happens at construction.
class DensityMatrix {
 public:
  DensityMatrix() = default;
  DensityMatrix(CompositeSpace space, Matrix matrix, const NumericPolicy& policy = default_policy())
      : op_(std::move(space), std::move(matrix)) {
    const auto d = diagnose_state(op_.matrix());
    if (d.hermiticity_error > policy.algebraic_tol) {
      throw DomainError("density matrix is not Hermitian (error " + std::to_string(d.hermiticity_error) + ")");
    }
    if (d.trace_error > policy.algebraic_tol) {
      throw DomainError("density matrix trace differs from 1 by " + std::to_string(d.trace_error));
    }
    if (d.min_eigenvalue < -policy.positivity_slack) {
      throw DomainError("density matrix has eigenvalue " + std::to_string(d.min_eigenvalue));
    }
  }

  /// Pure state |ψ⟩⟨ψ| from a normalised vector.
  static DensityMatrix pure(const CompositeSpace& space, const Vector& psi,
                            const NumericPolicy& policy = default_policy()) {
    return DensityMatrix(space, psi * psi.adjoint(), policy);
  }

  /// Basis projector |digits⟩⟨digits|.
  static DensityMatrix basis_state(const CompositeSpace& space, std::span<const std::size_t> digits) {
    Vector psi = Vector::Zero(static_cast<Eigen::Index>(space.total_dim()));
    psi(static_cast<Eigen::Index>(space.index_of(digits))) = 1.0;
    return pure(space, psi);
  }

  static DensityMatrix maximally_mixed(const CompositeSpace& space) {
    const auto d = static_cast<Eigen::Index>(space.total_dim());
    return DensityMatrix(space, Matrix::Identity(d, d) / static_cast<double>(d));
  }

  const CompositeSpace& space() const noexcept { return op_.space(); }
  const Matrix& matrix() const noexcept { return op_.matrix(); }
  const Operator& as_operator() const noexcept { return op_; }
  Eigen::Index dim() const noexcept { return op_.dim(); }

  /// tr(ρ X)
  Complex expectation(const Operator& x) const { return (op_.matrix() * x.matrix()).trace(); }

 private:
  Operator op_;
};

/// Kronecker product with identities on every other subsystem.
inline Operator embed(const Matrix& local, const CompositeSpace& space, std::size_t position) {
  if (position >= space.size()) throw DomainError("embed: position " + std::to_string(position) + " out of range");
  const auto ld = static_cast<Eigen::Index>(space[position].dim);
  if (local.rows() != ld || local.cols() != ld) {
    throw DomainError("embed: local operator has dimension " + std::to_string(local.rows()) + ", subsystem has " +
                      std::to_string(ld));
  }
  const auto left = static_cast<Eigen::Index>(space.total_dim() / (space[position].dim * space.stride(position)));
  const auto right = static_cast<Eigen::Index>(space.stride(position));
  const auto d = static_cast<Eigen::Index>(space.total_dim());
  Matrix out = Matrix::Zero(d, d);
  // out = I_left ⊗ local ⊗ I_right
  for (Eigen::Index l = 0; l < left; ++l) {
    for (Eigen::Index a = 0; a < ld; ++a) {
      for (Eigen::Index b = 0; b < ld; ++b) {
        const Complex v = local(a, b);
        if (v == Complex(0.0, 0.0)) continue;
        for (Eigen::Index r = 0; r < right; ++r) {
          out((l * ld + a) * right + r, (l * ld + b) * right + r) = v;
        }
      }
    }
  }
  return Operator(space, std::move(out));
}

/// Truncated bosonic annihilation operator: entries √k at (k-1, k).
inline Matrix boson_annihilation_local(std::size_t dim) {
  const auto d = static_cast<Eigen::Index>(dim);
  Matrix a = Matrix::Zero(d, d);
  for (Eigen::Index k = 1; k < d; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  return a;
}

/// |g⟩⟨e| in the (g, e) ordering.
inline Matrix qubit_lowering_local() {
  Matrix s = Matrix::Zero(2, 2);
  s(0, 1) = 1.0;
  return s;
}

inline Operator boson_annihilation(const CompositeSpace& space, std::size_t position) {
  if (position >= space.size()) throw DomainError("boson_annihilation: position out of range");
  if (space[position].kind != SubsystemKind::boson) {
    throw DomainError("boson_annihilation: subsystem " + std::to_string(position) + " is not a boson");
  }
  return embed(boson_annihilation_local(space[position].dim), space, position);
}

inline Operator qubit_lowering(const CompositeSpace& space, std::size_t position) {
  if (position >= space.size()) throw DomainError("qubit_lowering: position out of range");
  if (space[position].kind != SubsystemKind::qubit) {
    throw DomainError("qubit_lowering: subsystem " + std::to_string(position) + " is not a qubit");
  }
  return embed(qubit_lowering_local(), space, position);
}

/// Photon number operator diag(0, 1, ..., dim-1), exact in floating point.
inline Operator boson_number(const CompositeSpace& space, std::size_t position) {
  if (position >= space.size() || space[position].kind != SubsystemKind::boson) {
    throw DomainError("boson_number: subsystem " + std::to_string(position) + " is not a boson");
  }
  const auto d = static_cast<Eigen::Index>(space[position].dim);
  const Matrix local = Eigen::VectorXd::LinSpaced(d, 0.0, static_cast<double>(d - 1)).cast<Complex>().asDiagonal();
  return embed(local, space, position);
}

namespace detail {

// Global index table for (kept digits, traced digits) pairs.
struct SplitIndex {
  std::vector<std::size_t> kept_dims;
  std::size_t kept_total = 1;
  std::size_t traced_total = 1;
  std::vector<std::size_t> table;  // table[k * traced_total + t]

  std::size_t at(std::size_t k, std::size_t t) const { return table[k * traced_total + t]; }
};

inline SplitIndex split_index(const CompositeSpace& space, const std::vector<std::size_t>& keep) {
  SplitIndex s;
  std::vector<bool> kept(space.size(), false);
  for (auto k : keep) kept[k] = true;
  std::vector<std::size_t> traced;
  for (std::size_t i = 0; i < space.size(); ++i) {
    if (!kept[i]) traced.push_back(i);
  }
  for (auto k : keep) {
    s.kept_dims.push_back(space[k].dim);
    s.kept_total *= space[k].dim;
  }
  for (auto t : traced) s.traced_total *= space[t].dim;
  s.table.resize(s.kept_total * s.traced_total);

  std::vector<std::size_t> digits(space.size());
  for (std::size_t k = 0; k < s.kept_total; ++k) {
    std::size_t rem = k;
    for (std::size_t i = keep.size(); i-- > 0;) {
      digits[keep[i]] = rem % space[keep[i]].dim;
      rem /= space[keep[i]].dim;
    }
    for (std::size_t t = 0; t < s.traced_total; ++t) {
      std::size_t r = t;
      for (std::size_t i = traced.size(); i-- > 0;) {
        digits[traced[i]] = r % space[traced[i]].dim;
        r /= space[traced[i]].dim;
      }
      s.table[k * s.traced_total + t] = space.index_of(digits);
    }
  }
  return s;
}

inline std::vector<std::size_t> normalize_keep(const CompositeSpace& space, std::vector<std::size_t> keep) {
  if (keep.empty()) throw DomainError("partial_trace: keep set is empty");
  std::sort(keep.begin(), keep.end());
  if (std::adjacent_find(keep.begin(), keep.end()) != keep.end()) {
    throw DomainError("partial_trace: duplicate subsystem index");
  }
  if (keep.back() >= space.size()) throw DomainError("partial_trace: subsystem index out of range");
  return keep;
}

}  // namespace detail

/// Reduced space made of the kept subsystems in their original order.
inline CompositeSpace subspace(const CompositeSpace& space, std::vector<std::size_t> keep) {
  keep = detail::normalize_keep(space, std::move(keep));
  std::vector<SubsystemSpec> subs;
  for (auto k : keep) subs.push_back(space[k]);
  return CompositeSpace(std::move(subs));
}

/// Partial trace of an arbitrary operator (not necessarily a state).
inline Operator partial_trace(const Operator& op, std::vector<std::size_t> keep) {
  keep = detail::normalize_keep(op.space(), std::move(keep));
  const auto split = detail::split_index(op.space(), keep);
  const auto dk = static_cast<Eigen::Index>(split.kept_total);
  Matrix out = Matrix::Zero(dk, dk);
  const Matrix& m = op.matrix();
  for (std::size_t a = 0; a < split.kept_total; ++a) {
    for (std::size_t b = 0; b < split.kept_total; ++b) {
      Complex acc = 0.0;
      for (std::size_t t = 0; t < split.traced_total; ++t) {
        acc += m(static_cast<Eigen::Index>(split.at(a, t)), static_cast<Eigen::Index>(split.at(b, t)));
      }
      out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = acc;
    }
  }
  return Operator(subspace(op.space(), keep), std::move(out));
}

inline DensityMatrix partial_trace(const DensityMatrix& rho, std::vector<std::size_t> keep,
                                   const NumericPolicy& policy = default_policy()) {
  auto reduced = partial_trace(rho.as_operator(), std::move(keep));
  return DensityMatrix(reduced.space(), reduced.matrix(), policy);
}

}  // namespace qdent
