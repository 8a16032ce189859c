#pragma once

#include <stdexcept>
#include <string>

namespace qbattery {

// Argument errors use std::invalid_argument / std::out_of_range directly.

/// Floating-point range exceeded (e.g. matrix exponential overflow).
class NumericRangeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative kernel failed to converge.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates a numeric precondition (e.g. non-Hermitian where Hermitian is required).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DegenerateSpectrumError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateGroundStateError : public std::runtime_error {
 public:
  DegenerateGroundStateError(const std::string& what, double gap)
      : std::runtime_error(what), gap_(gap) {}
  double gap() const noexcept { return gap_; }

 private:
  double gap_;
};

/// The norm of a non-unitarily evolved state fell below the representable range.
class NormalizationUnderflowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A quantity that must be real carried an imaginary residue above threshold.
class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Closed-form expression evaluated at a singular parameter set.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace qbattery
