#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qdent {

/// Precondition violated by the caller (bad index, bad dimension, negative rate).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Unknown preset or named entity.
class LookupError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// A linear or steady-state solve could not produce a trustworthy answer.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double condition_estimate, std::size_t kernel_dimension = 0)
      : std::runtime_error(what),
        condition_estimate_(condition_estimate),
        kernel_dimension_(kernel_dimension) {}

  double condition_estimate() const noexcept { return condition_estimate_; }
  /// Estimated null-space dimension; 0 when not computed.
  std::size_t kernel_dimension() const noexcept { return kernel_dimension_; }

 private:
  double condition_estimate_;
  std::size_t kernel_dimension_;
};

/// The adaptive integrator could not meet its tolerance.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double time, double achieved_error)
      : std::runtime_error(what), time_(time), achieved_error_(achieved_error) {}

  double time() const noexcept { return time_; }
  double achieved_error() const noexcept { return achieved_error_; }

 private:
  double time_;
  double achieved_error_;
};

}  // namespace qdent
