#pragma once

#include <limits>
#include <variant>

#include "qbattery/matrix.hpp"
#include "qbattery/tensor_core.hpp"

namespace qbattery {

/// Pure state vector or density matrix, always normalized.
class QuantumState {
 public:
  enum class Representation { pure_vector, density_matrix };

  /// Normalizes `psi`; throws std::invalid_argument for a zero vector.
  static QuantumState pure(CVector psi);
  /// Divides by the trace; throws std::invalid_argument for a non-positive trace.
  static QuantumState density(CMatrix rho);

  Representation representation() const noexcept {
    return std::holds_alternative<CVector>(data_) ? Representation::pure_vector
                                                  : Representation::density_matrix;
  }
  bool is_pure_vector() const noexcept { return representation() == Representation::pure_vector; }
  std::size_t dim() const noexcept;

  /// Requires a pure-vector representation.
  const CVector& vector() const;
  /// Requires a density-matrix representation.
  const CMatrix& matrix() const;
  /// Density matrix for either representation.
  CMatrix to_density() const;

  /// tr(A rho) or <psi|A|psi>.
  cplx expectation(const CMatrix& a) const;
  /// tr(rho^2); 1 for pure vectors.
  double purity() const;

 private:
  explicit QuantumState(std::variant<CVector, CMatrix> d) : data_(std::move(d)) {}
  std::variant<CVector, CMatrix> data_;
};

inline constexpr double kInfiniteBeta = std::numeric_limits<double>::infinity();
inline constexpr double kDefaultDegeneracyTol = 1e-9;

/// Lowest eigenvector, phase-fixed so its largest-magnitude component is real
/// positive. Throws DegenerateGroundStateError when lambda_1 - lambda_0 < degeneracy_tol.
QuantumState ground_state(const Operator& h, double degeneracy_tol = kDefaultDegeneracyTol);

/// exp(-beta H)/Z, evaluated in the eigenbasis with the ground energy factored
/// out. beta = kInfiniteBeta gives the equal-weight mixture over the ground space.
QuantumState thermal_state(const Operator& h, double beta,
                           double degeneracy_tol = kDefaultDegeneracyTol);

}  // namespace qbattery
