#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace qbattery {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;
using RVector = std::vector<double>;

inline constexpr cplx kI{0.0, 1.0};

/// Dense square complex matrix, row-major.
class CMatrix {
 public:
  CMatrix() = default;
  explicit CMatrix(std::size_t dim) : dim_(dim), data_(dim * dim) {}
  CMatrix(std::size_t dim, std::vector<cplx> data);
  /// Row-by-row literal, mostly for tests: CMatrix{{1, 0}, {0, -1}}.
  CMatrix(std::initializer_list<std::initializer_list<cplx>> rows);

  static CMatrix identity(std::size_t dim);
  static CMatrix diagonal(std::span<const cplx> diag);
  static CMatrix diagonal(std::span<const double> diag);

  std::size_t dim() const noexcept { return dim_; }
  bool empty() const noexcept { return dim_ == 0; }

  cplx& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * dim_ + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const noexcept {
    return data_[r * dim_ + c];
  }

  std::span<cplx> row(std::size_t r) noexcept { return {data_.data() + r * dim_, dim_}; }
  std::span<const cplx> row(std::size_t r) const noexcept {
    return {data_.data() + r * dim_, dim_};
  }

  std::span<const cplx> data() const noexcept { return data_; }
  std::span<cplx> data() noexcept { return data_; }

  CMatrix& operator+=(const CMatrix& other);
  CMatrix& operator-=(const CMatrix& other);
  CMatrix& operator*=(cplx s);

  CMatrix adjoint() const;
  CMatrix conjugate() const;
  CMatrix transpose() const;

  cplx trace() const noexcept;
  double frobenius_norm() const noexcept;
  /// Maximum absolute column sum.
  double one_norm() const noexcept;
  double max_abs() const noexcept;
  bool all_finite() const noexcept;

  friend bool operator==(const CMatrix&, const CMatrix&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<cplx> data_;
};

CMatrix operator+(CMatrix a, const CMatrix& b);
CMatrix operator-(CMatrix a, const CMatrix& b);
CMatrix operator*(CMatrix a, cplx s);
CMatrix operator*(cplx s, CMatrix a);
CMatrix operator*(const CMatrix& a, const CMatrix& b);

CVector operator*(const CMatrix& a, std::span<const cplx> v);

CMatrix kron(const CMatrix& a, const CMatrix& b);
CMatrix commutator(const CMatrix& a, const CMatrix& b);

/// ||a - b||_F
double distance(const CMatrix& a, const CMatrix& b);
/// ||A - A^dagger||_F
double hermiticity_residual(const CMatrix& a);

cplx inner(std::span<const cplx> a, std::span<const cplx> b);
double norm(std::span<const cplx> v);
/// <v|A|v>
cplx expectation(const CMatrix& a, std::span<const cplx> v);
/// |v><v|
CMatrix outer(std::span<const cplx> v);

}  // namespace qbattery
