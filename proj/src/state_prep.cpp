#include "qbattery/state_prep.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "qbattery/dense_linalg.hpp"
#include "qbattery/errors.hpp"

namespace qbattery {

QuantumState QuantumState::pure(CVector psi) {
  const double n = norm(psi);
  if (!(n > 0.0) || !std::isfinite(n)) throw std::invalid_argument("QuantumState::pure: zero or non-finite vector");
  for (auto& x : psi) x /= n;
  return QuantumState(std::move(psi));
}

QuantumState QuantumState::density(CMatrix rho) {
  const double tr = rho.trace().real();
  if (!(tr > 0.0) || !std::isfinite(tr)) {
    throw std::invalid_argument("QuantumState::density: trace must be positive and finite");
  }
  rho *= cplx{1.0 / tr};
  return QuantumState(std::move(rho));
}

std::size_t QuantumState::dim() const noexcept {
  return is_pure_vector() ? std::get<CVector>(data_).size() : std::get<CMatrix>(data_).dim();
}

const CVector& QuantumState::vector() const {
  if (!is_pure_vector()) throw std::logic_error("QuantumState::vector: state is a density matrix");
  return std::get<CVector>(data_);
}

const CMatrix& QuantumState::matrix() const {
  if (is_pure_vector()) throw std::logic_error("QuantumState::matrix: state is a pure vector");
  return std::get<CMatrix>(data_);
}

CMatrix QuantumState::to_density() const {
  return is_pure_vector() ? outer(std::get<CVector>(data_)) : std::get<CMatrix>(data_);
}

cplx QuantumState::expectation(const CMatrix& a) const {
  if (a.dim() != dim()) throw std::invalid_argument("QuantumState::expectation: dimension mismatch");
  if (is_pure_vector()) return qbattery::expectation(a, std::get<CVector>(data_));
  // tr(A rho) without forming the product.
  const CMatrix& rho = std::get<CMatrix>(data_);
  cplx s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t k = 0; k < a.dim(); ++k) s += a(i, k) * rho(k, i);
  return s;
}

double QuantumState::purity() const {
  if (is_pure_vector()) return 1.0;
  const CMatrix& rho = std::get<CMatrix>(data_);
  double s = 0.0;
  for (std::size_t i = 0; i < rho.dim(); ++i)
    for (std::size_t k = 0; k < rho.dim(); ++k) s += (rho(i, k) * rho(k, i)).real();
  return s;
}

QuantumState ground_state(const Operator& h, double degeneracy_tol) {
  const HermitianEigen eig = hermitian_eig(h.matrix);
  const std::size_t dim = eig.values.size();
  if (dim >= 2) {
    const double gap = eig.values[1] - eig.values[0];
    if (gap < degeneracy_tol) {
      throw DegenerateGroundStateError(
          "ground_state: ground level is degenerate (gap " + std::to_string(gap) + " < " +
              std::to_string(degeneracy_tol) + ")",
          gap);
    }
  }
  CVector psi(dim);
  std::size_t big = 0;
  for (std::size_t r = 0; r < dim; ++r) {
    psi[r] = eig.vectors(r, 0);
    if (std::abs(psi[r]) > std::abs(psi[big]) + 1e-12) big = r;
  }
  const cplx phase = std::conj(psi[big]) / std::abs(psi[big]);
  for (auto& x : psi) x *= phase;
  psi[big] = std::abs(psi[big]);
  return QuantumState::pure(std::move(psi));
}

QuantumState thermal_state(const Operator& h, double beta, double degeneracy_tol) {
  if (std::isnan(beta) || beta < 0.0) throw std::invalid_argument("thermal_state: beta must be >= 0");
  const HermitianEigen eig = hermitian_eig(h.matrix);
  const std::size_t dim = eig.values.size();
  const double e0 = eig.values.front();
  RVector weight(dim, 0.0);
  for (std::size_t k = 0; k < dim; ++k) {
    const double de = eig.values[k] - e0;
    if (std::isinf(beta)) {
      weight[k] = de < degeneracy_tol ? 1.0 : 0.0;
    } else {
      weight[k] = std::exp(-beta * de);
    }
  }
  double z = 0.0;
  for (double w : weight) z += w;
  CMatrix rho(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    const double p = weight[k] / z;
    if (p == 0.0) continue;
    for (std::size_t r = 0; r < dim; ++r) {
      const cplx vr = eig.vectors(r, k) * p;
      for (std::size_t c = 0; c < dim; ++c) rho(r, c) += vr * std::conj(eig.vectors(c, k));
    }
  }
  return QuantumState::density(std::move(rho));
}

}  // namespace qbattery
