#pragma once

namespace qdent {

/// Tolerances shared by every module. One record so property tests and the
/// CLI can tighten or relax them in a single place.
struct NumericPolicy {
  double algebraic_tol = 1e-10;      // Hermiticity, trace, reconstruction
  double positivity_slack = 1e-9;    // smallest admissible eigenvalue is -slack
  double eigen_noise_floor = 1e-12;  // |λ| below this counts as zero in negativity
  double steady_residual = 1e-9;     // ‖L vec(ρ)‖ bound for steady states
  double degeneracy_ratio = 1e-12;   // σ₂(L) / ‖L‖ below this → degenerate kernel
  double integrator_rtol = 1e-8;
  double integrator_atol = 1e-12;
  double trajectory_trace_drift = 1e-7;
  double trajectory_positivity_slack = 1e-8;

  bool operator==(const NumericPolicy&) const = default;
};

inline const NumericPolicy& default_policy() {
  static const NumericPolicy policy{};
  return policy;
}

}  // namespace qdent
