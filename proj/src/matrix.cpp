#include "qbattery/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qbattery {

namespace {

void require_same_dim(const CMatrix& a, const CMatrix& b, const char* op) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument(std::string(op) + ": dimension mismatch (" +
                                std::to_string(a.dim()) + " vs " + std::to_string(b.dim()) + ")");
  }
}

}  // namespace

CMatrix::CMatrix(std::size_t dim, std::vector<cplx> data) : dim_(dim), data_(std::move(data)) {
  if (data_.size() != dim_ * dim_) {
    throw std::invalid_argument("CMatrix: data size does not match dim^2");
  }
}

CMatrix::CMatrix(std::initializer_list<std::initializer_list<cplx>> rows) : dim_(rows.size()) {
  data_.reserve(dim_ * dim_);
  for (const auto& r : rows) {
    if (r.size() != dim_) throw std::invalid_argument("CMatrix: literal must be square");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

CMatrix CMatrix::identity(std::size_t dim) {
  CMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

CMatrix CMatrix::diagonal(std::span<const cplx> diag) {
  CMatrix m(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

CMatrix CMatrix::diagonal(std::span<const double> diag) {
  CMatrix m(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

CMatrix& CMatrix::operator+=(const CMatrix& other) {
  require_same_dim(*this, other, "operator+=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& other) {
  require_same_dim(*this, other, "operator-=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

CMatrix& CMatrix::operator*=(cplx s) {
  for (auto& x : data_) x *= s;
  return *this;
}

CMatrix CMatrix::adjoint() const {
  CMatrix out(dim_);
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t c = 0; c < dim_; ++c) out(c, r) = std::conj((*this)(r, c));
  return out;
}

CMatrix CMatrix::conjugate() const {
  CMatrix out(*this);
  for (auto& x : out.data_) x = std::conj(x);
  return out;
}

CMatrix CMatrix::transpose() const {
  CMatrix out(dim_);
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t c = 0; c < dim_; ++c) out(c, r) = (*this)(r, c);
  return out;
}

cplx CMatrix::trace() const noexcept {
  cplx t = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
  return t;
}

double CMatrix::frobenius_norm() const noexcept {
  double s = 0.0;
  for (const auto& x : data_) s += std::norm(x);
  return std::sqrt(s);
}

double CMatrix::one_norm() const noexcept {
  double best = 0.0;
  for (std::size_t c = 0; c < dim_; ++c) {
    double s = 0.0;
    for (std::size_t r = 0; r < dim_; ++r) s += std::abs((*this)(r, c));
    best = std::max(best, s);
  }
  return best;
}

double CMatrix::max_abs() const noexcept {
  double best = 0.0;
  for (const auto& x : data_) best = std::max(best, std::abs(x));
  return best;
}

bool CMatrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](const cplx& x) {
    return std::isfinite(x.real()) && std::isfinite(x.imag());
  });
}

CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
CMatrix operator*(CMatrix a, cplx s) { return a *= s; }
CMatrix operator*(cplx s, CMatrix a) { return a *= s; }

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
  require_same_dim(a, b, "operator*");
  const std::size_t n = a.dim();
  CMatrix c(n);
  // i-k-j order over interleaved doubles; std::complex multiply is avoided in
  // the inner loop so the compiler can vectorize it.
  const double* bd = reinterpret_cast<const double*>(b.data().data());
  double* cd = reinterpret_cast<double*>(c.data().data());
  for (std::size_t i = 0; i < n; ++i) {
    double* crow = cd + 2 * i * n;
    for (std::size_t k = 0; k < n; ++k) {
      const cplx aik = a(i, k);
      const double ar = aik.real();
      const double ai = aik.imag();
      if (ar == 0.0 && ai == 0.0) continue;
      const double* brow = bd + 2 * k * n;
      for (std::size_t j = 0; j < n; ++j) {
        const double br = brow[2 * j];
        const double bi = brow[2 * j + 1];
        crow[2 * j] += ar * br - ai * bi;
        crow[2 * j + 1] += ar * bi + ai * br;
      }
    }
  }
  return c;
}

CVector operator*(const CMatrix& a, std::span<const cplx> v) {
  if (v.size() != a.dim()) throw std::invalid_argument("matvec: dimension mismatch");
  const std::size_t n = a.dim();
  CVector out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double re = 0.0;
    double im = 0.0;
    const auto row = a.row(i);
    for (std::size_t j = 0; j < n; ++j) {
      re += row[j].real() * v[j].real() - row[j].imag() * v[j].imag();
      im += row[j].real() * v[j].imag() + row[j].imag() * v[j].real();
    }
    out[i] = {re, im};
  }
  return out;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  const std::size_t na = a.dim();
  const std::size_t nb = b.dim();
  CMatrix out(na * nb);
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < na; ++j) {
      const cplx aij = a(i, j);
      if (aij == cplx{}) continue;
      for (std::size_t k = 0; k < nb; ++k)
        for (std::size_t l = 0; l < nb; ++l) out(i * nb + k, j * nb + l) = aij * b(k, l);
    }
  return out;
}

CMatrix commutator(const CMatrix& a, const CMatrix& b) { return a * b - b * a; }

double distance(const CMatrix& a, const CMatrix& b) {
  require_same_dim(a, b, "distance");
  double s = 0.0;
  const auto da = a.data();
  const auto db = b.data();
  for (std::size_t i = 0; i < da.size(); ++i) s += std::norm(da[i] - db[i]);
  return std::sqrt(s);
}

double hermiticity_residual(const CMatrix& a) {
  double s = 0.0;
  for (std::size_t r = 0; r < a.dim(); ++r)
    for (std::size_t c = 0; c < a.dim(); ++c) s += std::norm(a(r, c) - std::conj(a(c, r)));
  return std::sqrt(s);
}

cplx inner(std::span<const cplx> a, std::span<const cplx> b) {
  if (a.size() != b.size()) throw std::invalid_argument("inner: dimension mismatch");
  cplx s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

double norm(std::span<const cplx> v) {
  double s = 0.0;
  for (const auto& x : v) s += std::norm(x);
  return std::sqrt(s);
}

cplx expectation(const CMatrix& a, std::span<const cplx> v) {
  const CVector av = a * v;
  return inner(v, av);
}

CMatrix outer(std::span<const cplx> v) {
  CMatrix m(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = v[i] * std::conj(v[j]);
  return m;
}

}  // namespace qbattery
