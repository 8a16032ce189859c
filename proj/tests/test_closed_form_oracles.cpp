#include <cmath>

#include "doctest.h"
#include "qbattery/closed_form_oracles.hpp"
#include "qbattery/errors.hpp"
#include "qbattery/matrix.hpp"
#include "qbattery/oracle_check.hpp"

using namespace qbattery;
using namespace qbattery::oracle;

namespace {

double phase_free_distance(const CVector& a, const CVector& b) {
  return std::sqrt(std::max(0.0, 1.0 - std::norm(inner(a, b)) / (norm(a) * norm(a) * norm(b) * norm(b))));
}

}  // namespace

TEST_CASE("PT closed forms reduce to the Hermitian ones at alpha = 0") {
  for (double t : {0.1, 0.7, 3.3, 9.9}) {
    for (double J : {-1.0, 0.0, 0.5, 2.0}) {
      CHECK(std::abs(pt_power_n2(t, 1.0, J, 0.0) - pt_herm_power_n2(t, 1.0, J, 0.0)) < 1e-12);
    }
  }
}

TEST_CASE("PT state") {
  for (double a : {0.2, M_PI / 3, 1.3}) {
    for (double t : {0.0, 0.5, 4.0}) CHECK(std::abs(norm(pt_state_n2(a, t)) - 1.0) < 1e-14);
  }
  // t = 0 is the initial |11>.
  const CVector s0 = pt_state_n2(M_PI / 3, 0.0);
  CHECK(std::abs(std::abs(s0[3]) - 1.0) < 1e-14);
  CHECK(std::abs(s0[1] - s0[2]) == 0.0);
  CHECK_THROWS_AS(pt_state_n2(M_PI / 2, 1.0), DomainError);
  CHECK_THROWS_AS(pt_power_n2(1.0, 1.0, 1.0, M_PI / 2), DomainError);
  CHECK_THROWS_AS(pt_power_n2(0.0, 1.0, 1.0, 0.3), DomainError);
  CHECK_THROWS_AS(pt_power_n2(1.0, 0.0, 1.0, 0.3), DomainError);
  CHECK_THROWS_AS(pt_herm_power_n2(-1.0, 1.0, 1.0, 0.3), DomainError);
}

TEST_CASE("RT closed forms reduce to the Hermitian ones at gamma' = 0") {
  for (double t : {0.1, 1.0, 5.0}) {
    for (double h : {0.3, 1.0, 1.7}) {
      CHECK(std::abs(rt_power_n2(t, 0.0, h) - rt_herm_power_n2(t, 0.0, h)) < 1e-12);
    }
  }
}

TEST_CASE("RT state") {
  for (double g : {0.3, 1.5}) {
    const CVector s = rt_state_n2(g, 0.5, 0.0);
    CHECK(std::abs(s[0] - 0.5) < 1e-14);
    CHECK(std::abs(s[1] + 0.5) < 1e-14);
    CHECK(std::abs(s[2] + 0.5) < 1e-14);
    CHECK(std::abs(s[3] - 0.5) < 1e-14);
    for (double t : {0.4, 2.0, 7.0}) {
      const CVector v = rt_state_n2(g, 0.5, t);
      CHECK(std::abs(norm(v) - 1.0) < 1e-12);
      CHECK(v[1] == v[2]);
    }
  }
  CHECK_THROWS_AS(rt_state_n2(1.0, 0.5, 1.0), DomainError);
}

TEST_CASE("RT branches") {
  CHECK(rt_power_branch(0.5, 0.5) == Branch::rt_power_sub);
  CHECK(rt_power_branch(1.5, 0.5) == Branch::rt_power_super);
  CHECK_THROWS_AS(rt_power_branch(1.0, 0.5), DomainError);
  CHECK_THROWS_AS(rt_power_n2(1.0, 1.0, 0.5), DomainError);
  CHECK_THROWS_AS(rt_power_n2(0.0, 0.3, 0.5), DomainError);

  // The two forms join continuously across gamma'^2 = 4h^2.
  const double h = 0.5;
  const double below = std::sqrt(4 * h * h - 1e-6);
  const double above = std::sqrt(4 * h * h + 1e-6);
  REQUIRE(rt_power_branch(below, h) == Branch::rt_power_sub);
  REQUIRE(rt_power_branch(above, h) == Branch::rt_power_super);
  for (double t : {0.3, 1.0, 4.0, 9.0}) {
    CHECK(std::abs(rt_power_n2(t, below, h) - rt_power_n2(t, above, h)) < 1e-5);
  }
}

TEST_CASE("alternative forms that disagree with direct evolution") {
  // Hermitian PT power: off by a factor in the denominator.
  CHECK(std::abs(pt_herm_power_n2_as_printed(2.0, 1.0, 1.0, M_PI / 3) -
                 pt_herm_power_n2(2.0, 1.0, 1.0, M_PI / 3)) > 1e-3);
  // Hermitian RT power: 1 instead of 1/t.
  CHECK(std::abs(rt_herm_power_n2_as_printed(2.0, 0.5, 0.5) - rt_herm_power_n2(2.0, 0.5, 0.5)) >
        1e-3);
  // Super-threshold RT power; the sub-threshold transcription agrees.
  CHECK(std::abs(rt_power_n2_as_printed(2.0, 1.5, 0.5) - rt_power_n2(2.0, 1.5, 0.5)) > 1e-3);
  CHECK(rt_power_n2_as_printed(2.0, 0.5, 0.5) == rt_power_n2(2.0, 0.5, 0.5));
  // PT state.
  CHECK(phase_free_distance(pt_state_n2_as_printed(M_PI / 3, 2.0), pt_state_n2(M_PI / 3, 2.0)) >
        1e-3);
}

TEST_CASE("closed forms agree with the numerical pipeline") {
  const std::vector<double> times = oracle_time_grid(0.01, 10.0, 400);
  REQUIRE(times.size() == 400);
  CHECK(times.front() == 0.01);
  CHECK(times.back() == 10.0);
  const auto pt = numeric_pt_power(0.5, 1.0, 1.1, false, times);
  const auto pth = numeric_pt_power(0.5, 1.0, 1.1, true, times);
  const auto rt = numeric_rt_power(0.8, 0.2, false, times);
  const auto rth = numeric_rt_power(0.8, 0.2, true, times);
  for (std::size_t i = 0; i < times.size(); ++i) {
    CHECK(std::abs(pt[i] - pt_power_n2(times[i], 1.0, 0.5, 1.1)) < 1e-8);
    CHECK(std::abs(pth[i] - pt_herm_power_n2(times[i], 1.0, 0.5, 1.1)) < 1e-8);
    CHECK(std::abs(rt[i] - rt_power_n2(times[i], 0.8, 0.2)) < 1e-8);
    CHECK(std::abs(rth[i] - rt_herm_power_n2(times[i], 0.8, 0.2)) < 1e-8);
  }

  const auto rows = run_oracle_checks();
  int gated = 0;
  int info = 0;
  for (const auto& r : rows) {
    INFO(r.name);
    if (r.tolerance > 0) {
      ++gated;
      CHECK(r.passed);
      CHECK(r.max_abs_error <= r.tolerance);
    } else {
      ++info;
      CHECK(r.max_abs_error > 1e-6);
    }
  }
  CHECK(gated > 0);
  CHECK(info > 0);
}
