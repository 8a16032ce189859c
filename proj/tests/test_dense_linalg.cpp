#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "qbattery/dense_linalg.hpp"
#include "qbattery/errors.hpp"
#include "qbattery/model_builders.hpp"
#include "test_helpers.hpp"

using namespace qbattery;
using qbattery::testing::random_hermitian;
using qbattery::testing::random_matrix;
using qbattery::testing::taylor_expm;

namespace {

const CMatrix kX = pauli(PauliAxis::x).matrix;
const CMatrix kZ = pauli(PauliAxis::z).matrix;

// Characteristic-polynomial coefficients c_0..c_n of det(lambda I - M)
// (c_n = 1) by Faddeev-LeVerrier.
std::vector<cplx> char_poly(const CMatrix& m) {
  const std::size_t n = m.dim();
  std::vector<cplx> c(n + 1);
  c[n] = 1.0;
  CMatrix mk(n);
  for (std::size_t k = 1; k <= n; ++k) {
    CMatrix a = mk;
    for (std::size_t i = 0; i < n; ++i) a(i, i) += c[n - k + 1];
    mk = m * a;
    c[n - k] = -mk.trace() / static_cast<double>(k);
  }
  return c;
}

cplx eval_poly(const std::vector<cplx>& c, cplx x) {
  cplx acc = 0.0;
  for (std::size_t i = c.size(); i-- > 0;) acc = acc * x + c[i];
  return acc;
}

std::vector<double> sorted_real(const CVector& v) {
  std::vector<double> r;
  for (auto x : v) r.push_back(x.real());
  std::sort(r.begin(), r.end());
  return r;
}

}  // namespace

TEST_CASE("expm: closed-form cases") {
  CHECK(matrix_exponential(CMatrix(3), cplx{0.0, -4.0}) == CMatrix::identity(3));
  const double t = 0.7;
  const CMatrix ez = matrix_exponential(kZ, cplx{0.0, -t});
  CHECK(std::abs(ez(0, 0) - std::exp(cplx{0.0, -t})) < 1e-15);
  CHECK(std::abs(ez(1, 1) - std::exp(cplx{0.0, t})) < 1e-15);
  CHECK(std::abs(ez(0, 1)) == 0.0);
  // exp(-i theta X) = cos(theta) I - i sin(theta) X
  const double th = 2.3;
  const CMatrix ex = matrix_exponential(kX, cplx{0.0, -th});
  CMatrix ref = CMatrix::identity(2) * cplx{std::cos(th)} + kX * cplx{0.0, -std::sin(th)};
  CHECK(distance(ex, ref) < 1e-14);
  // Nilpotent: exp(N) = I + N.
  const CMatrix nil{{0.0, 3.0}, {0.0, 0.0}};
  CHECK(distance(matrix_exponential(nil), CMatrix::identity(2) + nil) < 1e-15);
}

TEST_CASE("expm: Taylor-series oracle") {
  const CMatrix h = kX + kZ * cplx{0.0, std::sin(M_PI / 3)};
  const CMatrix e = matrix_exponential(h, cplx{0.0, -1.0});
  const CMatrix ref = taylor_expm(h * cplx{0.0, -1.0});
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) CHECK(std::abs(e(i, j) - ref(i, j)) <= 1e-12);

  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 2 + trial % 7;
    const CMatrix m = random_matrix(n, rng, 0.05 * (trial + 1));
    const CMatrix a = matrix_exponential(m);
    const CMatrix b = taylor_expm(m);
    CHECK(distance(a, b) <= 1e-12 * b.frobenius_norm());
  }
}

TEST_CASE("expm: exceptional-point generator stays finite and exact") {
  // (X + iZ)^2 = 0, so exp(-i t (X + iZ)) = I - i t (X + iZ).
  const CMatrix h = kX + kZ * kI;
  for (double t : {0.1, 1.0, 10.0}) {
    const CMatrix e = matrix_exponential(h, cplx{0.0, -t});
    CHECK(distance(e, CMatrix::identity(2) + h * cplx{0.0, -t}) < 1e-13 * (1 + t));
  }
}

TEST_CASE("expm: overflow is reported") {
  CHECK_THROWS_AS(matrix_exponential(CMatrix::identity(2), cplx{1e4}), NumericRangeError);
}

TEST_CASE("expm properties on random matrices") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + trial % 16;
    CMatrix a = random_matrix(n, rng);
    a *= cplx{(1.0 + trial % 10) / a.frobenius_norm()};  // norms up to 10
    const CMatrix prod = matrix_exponential(a) * matrix_exponential(a, cplx{-1.0});
    CHECK(distance(prod, CMatrix::identity(n)) < 1e-10);

    const CMatrix h = random_hermitian(n, rng);
    const double t = -50.0 + 100.0 * trial / 19.0;
    const CMatrix u = matrix_exponential(h, cplx{0.0, -t});
    CHECK(distance(u * u.adjoint(), CMatrix::identity(n)) < 1e-10);
  }
}

TEST_CASE("hermitian_eig: small cases") {
  auto vz = hermitian_eig(kZ).values;
  CHECK(vz[0] == doctest::Approx(-1.0));
  CHECK(vz[1] == doctest::Approx(1.0));
  auto vxx = hermitian_eig(kron(kX, kX)).values;
  const std::vector<double> want{-1, -1, 1, 1};
  for (int i = 0; i < 4; ++i) CHECK(vxx[i] == doctest::Approx(want[i]).epsilon(1e-14));
  CHECK_THROWS_AS(hermitian_eig(CMatrix{{0.0, 1.0}, {0.0, 0.0}}), PreconditionError);
}

TEST_CASE("hermitian_eig: XX battery against characteristic polynomial") {
  BatterySpec spec;
  spec.J = 1.0;
  spec.h = 1.0;
  const Operator raw = build_battery_xyz(spec);
  const auto eig = hermitian_eig(raw);
  const auto poly = char_poly(raw.matrix);
  for (double l : eig.values) CHECK(std::abs(eval_poly(poly, l)) < 1e-12);
  const std::vector<double> want{-1.0, -0.5, 0.5, 1.0};
  const auto norm_vals = hermitian_eig(normalize_spectrum(raw)).values;
  for (int i = 0; i < 4; ++i) {
    CHECK(eig.values[i] == doctest::Approx(want[i]).epsilon(1e-13));
    CHECK(norm_vals[i] == doctest::Approx(want[i]).epsilon(1e-13));
  }
}

TEST_CASE("hermitian_eig: reconstruction and orthonormality") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + (trial * 5) % 40;
    const CMatrix m = random_hermitian(n, rng, 1.0 + trial);
    const auto eig = hermitian_eig(m);
    CHECK(std::is_sorted(eig.values.begin(), eig.values.end()));
    const CMatrix& v = eig.vectors;
    CHECK(distance(v.adjoint() * v, CMatrix::identity(n)) < 1e-10);
    const CMatrix rec = v * CMatrix::diagonal(eig.values) * v.adjoint();
    CHECK(distance(rec, m) < 1e-9 * m.frobenius_norm());
    // Residual per eigenpair.
    for (std::size_t k = 0; k < n; ++k) {
      CVector col(n);
      for (std::size_t r = 0; r < n; ++r) col[r] = v(r, k);
      CVector mv = m * std::span<const cplx>(col);
      for (std::size_t r = 0; r < n; ++r) mv[r] -= eig.values[k] * col[r];
      CHECK(norm(mv) < 1e-9 * m.frobenius_norm());
    }
  }
}

TEST_CASE("general_eigenvalues: PT charger examples") {
  const double a = M_PI / 3;
  const CMatrix pt = kX + kZ * cplx{0.0, std::sin(a)};
  const auto ev = sorted_real(general_eigenvalues(pt));
  CHECK(ev[0] == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(ev[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(max_imag(general_eigenvalues(pt)) < 1e-12);

  const CVector ep = general_eigenvalues(kX + kZ * kI);
  for (auto l : ep) CHECK(std::abs(l) < 1e-7);  // defective: O(sqrt(eps)) splitting

  // Two sites: single-site spectra +-cos(a) add.
  const auto ev2 = sorted_real(general_eigenvalues(build_pt_charger(a, 2)));
  const std::vector<double> want{-1.0, 0.0, 0.0, 1.0};
  for (int i = 0; i < 4; ++i) CHECK(std::abs(ev2[i] - want[i]) < 1e-12);
}

TEST_CASE("general_eigenvalues: characteristic polynomial and trace") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + trial % 12;
    const CMatrix m = random_matrix(n, rng);
    const CVector ev = general_eigenvalues(m);
    REQUIRE(ev.size() == n);
    cplx sum = 0.0;
    cplx prod = 1.0;
    for (auto l : ev) {
      sum += l;
      prod *= l;
    }
    CHECK(std::abs(sum - m.trace()) < 1e-8 * (1 + std::abs(m.trace())));
    if (n <= 4) {
      const auto poly = char_poly(m);
      const cplx det = (n % 2 == 0 ? 1.0 : -1.0) * poly[0];
      CHECK(std::abs(prod - det) < 1e-8 * (1 + std::abs(det)));
      for (auto l : ev) CHECK(std::abs(eval_poly(poly, l)) < 1e-9 * (1 + std::pow(std::abs(l), n)));
    }
  }
}

TEST_CASE("general_eigenvalues of Hermitian input match hermitian_eig") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 2 + 3 * trial;
    const CMatrix h = random_hermitian(n, rng);
    const CVector g = general_eigenvalues(h);
    CHECK(max_imag(g) <= 1e-9);
    CHECK(is_real_spectrum(g));
    const auto gr = sorted_real(g);
    const auto hv = hermitian_eig(h).values;
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(gr[i] - hv[i]) < 1e-8);
  }
}

TEST_CASE("is_defective_at") {
  CHECK(is_defective_at(kX + kZ * kI, 1e-6));
  CHECK_FALSE(is_defective_at(kZ, 1e-6));
  CHECK_FALSE(is_defective_at(CMatrix::identity(2), 1e-6));
  CHECK(is_defective_at(build_pt_charger(M_PI / 2, 1), 1e-6));
  CHECK_FALSE(is_defective_at(build_pt_charger(M_PI / 3, 1), 1e-6));
  // Two sites: a size-3 Jordan block, whose computed eigenvalues split by
  // ~eps^(1/3), so the cluster tolerance must exceed that.
  CHECK(is_defective_at(build_pt_charger(M_PI / 2, 2), 1e-4));
}

TEST_CASE("numerical_rank and solve") {
  CHECK(numerical_rank(CMatrix::identity(4), 1e-12) == 4);
  CHECK(numerical_rank(kron(kX, CMatrix{{1.0, 1.0}, {1.0, 1.0}}), 1e-12) == 2);
  std::mt19937_64 rng(3);
  const CMatrix a = random_matrix(6, rng);
  const CMatrix b = random_matrix(6, rng);
  CHECK(distance(a * solve(a, b), b) < 1e-10 * b.frobenius_norm());
  for (int trial = 0; trial < 10; ++trial) {
    // Rank-r product of random n x r and r x n factors (padded to square).
    const std::size_t n = 8;
    const std::size_t r = 1 + trial % 7;
    CMatrix u = random_matrix(n, rng);
    CMatrix v = random_matrix(n, rng);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = r; j < n; ++j) {
        u(i, j) = 0.0;
        v(j, i) = 0.0;
      }
    CHECK(numerical_rank(u * v, 1e-10) == static_cast<int>(r));
  }
}

TEST_CASE("real-spectrum threshold") {
  CHECK(is_real_spectrum(CVector{cplx{1.0, 1e-9}, cplx{-1.0}}));
  CHECK_FALSE(is_real_spectrum(CVector{cplx{1.0, 1e-7}}));
  CHECK(is_real_spectrum(CVector{cplx{1000.0, 1e-6}}));
}
