#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "qbattery/battery_dynamics.hpp"
#include "qbattery/closed_form_oracles.hpp"
#include "qbattery/dense_linalg.hpp"
#include "qbattery/errors.hpp"
#include "test_helpers.hpp"

using namespace qbattery;

namespace {

PreparedBattery xx_battery(double J, double h, int n) {
  BatterySpec s;
  s.J = J;
  s.h = h;
  s.n_sites = n;
  return prepare_battery(s);
}

ChargerSpec rt_spec(double gp, double h, int n, bool hermitian) {
  ChargerSpec c;
  c.kind = hermitian ? ChargerKind::rt_hermitian : ChargerKind::rt;
  c.gamma_prime = gp;
  c.h_prime = h;
  c.n_sites = n;
  return c;
}

// Limit of the two-site PT power closed form as alpha -> pi/2.
double pt_power_at_ep(double t, double h, double J) {
  const double c2 = (1 - t) * (1 - t);
  const double s2 = t * t;
  return (-h * c2 * c2 + h * s2 * s2 + J * c2 * s2) / (h * t * (c2 * c2 + 2 * c2 * s2 + s2 * s2)) +
         1.0 / t;
}

void check_valid_density(const CMatrix& rho) {
  CHECK(std::abs(rho.trace() - 1.0) < 1e-10);
  CHECK(hermiticity_residual(rho) < 1e-10);
  CMatrix sym = rho + rho.adjoint();
  sym *= cplx{0.5};
  CHECK(hermitian_eig(sym).values.front() >= -1e-9);
}

}  // namespace

TEST_CASE("evolve_normalized basics") {
  const PreparedBattery b = xx_battery(1, 1, 2);
  const QuantumState g = ground_state(b.normalized);
  const Operator pt = build_pt_charger(M_PI / 3, 2);
  CHECK(evolve_normalized(pt, g, 0.0).vector() == g.vector());
  CHECK_THROWS(evolve_normalized(pt, g, -1.0));

  const Operator herm = build_pt_hermitian_charger(M_PI / 3, 2);
  for (double t : {0.3, 2.0, 9.0}) {
    const CMatrix k = matrix_exponential(herm.matrix, cplx{0.0, -t});
    CHECK(std::abs(propagate(k, g).raw_trace - 1.0) < 1e-10);
    CHECK(std::abs(propagate(k, QuantumState::density(CMatrix::identity(4))).raw_trace - 1.0) <
          1e-10);
  }

  // Two-site PT state against the closed form.
  const CVector num = evolve_normalized(pt, g, 1.0).vector();
  const CVector ref = oracle::pt_state_n2(M_PI / 3, 1.0);
  CHECK(std::abs(std::abs(inner(ref, num)) - 1.0) < 1e-8);
}

TEST_CASE("normalization underflow is reported") {
  const Operator decay{CMatrix::identity(2) * cplx{0.0, -1000.0}, 1, false};
  const QuantumState s = QuantumState::pure({1.0, 0.0});
  CHECK_THROWS_AS(evolve_normalized(decay, s, 1.0), NormalizationUnderflowError);
  CHECK_THROWS_AS(evolve_normalized(decay, QuantumState::density(CMatrix::identity(2)), 1.0),
                  NormalizationUnderflowError);
}

TEST_CASE("work") {
  const PreparedBattery b = xx_battery(1, 1, 2);
  const QuantumState g = ground_state(b.normalized);
  CHECK(work(b.normalized, g, g) == 0.0);
  const Operator pt = build_pt_charger(M_PI / 3, 2);
  for (double t : {0.5, 1.0, 3.0, 7.5}) {
    const QuantumState s = evolve_normalized(pt, g, t);
    const double w = work(b.normalized, g, s);
    CHECK(w >= -1e-12);
    CHECK(w <= 2.0 + 1e-12);
    CHECK(std::abs(w - (s.expectation(b.normalized.matrix).real() + 1.0)) < 1e-12);
  }
  const double w1 = work(b.normalized, g, evolve_normalized(pt, g, 1.0));
  CHECK(std::abs(w1 - oracle::pt_power_n2(1.0, 1.0, 1.0, M_PI / 3)) < 1e-8);

  const Operator not_hermitian{pauli(PauliAxis::z).matrix * kI, 1, false};
  const QuantumState up = QuantumState::pure({1.0, 0.0});
  const QuantumState down = QuantumState::pure({0.0, 1.0});
  CHECK_THROWS_AS(work(not_hermitian, up, down), ConsistencyError);
}

TEST_CASE("ergotropy") {
  const PreparedBattery b = xx_battery(0.5, 1, 4);
  const QuantumState g = ground_state(b.normalized);
  CHECK(std::abs(ergotropy(b.normalized, g)) < 1e-12);
  CHECK(std::abs(ergotropy(b.normalized, QuantumState::density(CMatrix::identity(16)))) < 1e-12);
  CHECK(std::abs(ergotropy(b.normalized, QuantumState::density(g.to_density()))) < 1e-10);

  // Pure evolved states from the ground state: ergotropy = work.
  const Operator pt = build_pt_charger(2 * M_PI / 3, 4);
  for (double t : {0.2, 1.0, 4.0}) {
    const QuantumState s = evolve_normalized(pt, g, t);
    CHECK(std::abs(ergotropy(b.normalized, s) - work(b.normalized, g, s)) < 1e-10);
    // Same through the density-matrix path.
    const QuantumState d = QuantumState::density(s.to_density());
    CHECK(std::abs(ergotropy(b.normalized, d) - work(b.normalized, g, s)) < 1e-10);
  }
  // Mixed states are never below their passive energy.
  std::mt19937_64 rng(17);
  for (int k = 0; k < 5; ++k) {
    CMatrix a = qbattery::testing::random_matrix(16, rng);
    const QuantumState rho = QuantumState::density(a * a.adjoint());
    CHECK(ergotropy(b.normalized, rho) >= -1e-10);
  }
}

TEST_CASE("grid propagation matches direct evolution") {
  const PreparedBattery b = xx_battery(0.5, 1, 3);
  const Operator pt = build_pt_charger(1.1, 3);
  const QuantumState pure = ground_state(b.normalized);
  const QuantumState full = thermal_state(b.normalized, 0.7);
  // Rank-2 mixture exercises the factored path.
  CVector e0(8), e1(8);
  e0[0] = 1.0;
  e1[5] = 1.0;
  const QuantumState low = QuantumState::density(outer(e0) + outer(e1) * cplx{0.5});
  const double dt = 0.013;
  const int n = 300;
  for (const QuantumState* s : {&pure, &full, &low}) {
    int visited = 0;
    int last = 0;
    for_each_grid_state(pt, *s, dt, n, [&](int k, const QuantumState& st) {
      ++visited;
      CHECK(k == last + 1);
      last = k;
      if (k % 37 == 0 || k == n) {
        const CMatrix direct = evolve_normalized(pt, *s, k * dt).to_density();
        CHECK(distance(st.to_density(), direct) < 1e-11);
      }
    });
    CHECK(visited == n);
  }
}

TEST_CASE("power_trace") {
  const PreparedBattery b = xx_battery(1, 1, 2);
  const QuantumState g = ground_state(b.normalized);

  SUBCASE("stationary when the charger is the battery") {
    const PowerTrace tr = power_trace(b.normalized, b.normalized, g, 10.0, 200);
    for (double w : tr.work) CHECK(std::abs(w) < 1e-12);
    CHECK(std::abs(tr.p_max) < 1e-12);
  }
  SUBCASE("alpha = 0 PT and Hermitian chargers coincide") {
    const PowerTrace a = power_trace(b.normalized, build_pt_charger(0.0, 2), g, 10.0, 500);
    const PowerTrace c = power_trace(b.normalized, build_pt_hermitian_charger(0.0, 2), g, 10.0, 500);
    CHECK(a.power == c.power);
    CHECK(a.p_max == c.p_max);
    CHECK(a.t_star == c.t_star);
  }
  SUBCASE("exceptional point against the closed-form limit") {
    const PowerTrace tr = power_trace(b.normalized, build_pt_charger(M_PI / 2, 2), g, 10.0, 2000);
    double best = -INFINITY;
    for (int i = 1; i <= 100000; ++i) best = std::max(best, pt_power_at_ep(10.0 * i / 100000, 1, 1));
    CHECK(std::abs(tr.p_max - best) < 1e-6);
  }
  SUBCASE("grid, refinement and first point") {
    const Operator pt = build_pt_charger(M_PI / 3, 2);
    const PowerTrace tr = power_trace(b.normalized, pt, g, 10.0, 2000);
    REQUIRE(tr.times.size() == 2000);
    CHECK(tr.times.front() == doctest::Approx(0.005));
    CHECK(tr.times.back() == doctest::Approx(10.0));
    CHECK(tr.p_max >= *std::max_element(tr.power.begin(), tr.power.end()));
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
      CHECK(std::abs(tr.power[i] - oracle::pt_power_n2(tr.times[i], 1, 1, M_PI / 3)) < 1e-8);
      CHECK(std::abs(tr.ergotropy[i] - tr.work[i]) < 1e-10);
    }
    CHECK(std::abs(tr.p_max - oracle::pt_power_n2(tr.t_star, 1, 1, M_PI / 3)) < 1e-10);
    const PowerTrace tiny = power_trace(b.normalized, pt, g, 1e-4 * 16, 16);
    CHECK(std::abs(tiny.work.front()) <= 1e-6);
  }
  CHECK_THROWS(power_trace(b.normalized, b.normalized, g, 10.0, 15));
  CHECK_THROWS(power_trace(b.normalized, b.normalized, g, 0.0, 100));
}

TEST_CASE("alpha and pi - alpha give the same trace") {
  const PreparedBattery b = xx_battery(0.5, 1, 3);
  const QuantumState g = ground_state(b.normalized);
  const PowerTrace a = power_trace(b.normalized, build_pt_charger(0.4, 3), g, 5.0, 200);
  const PowerTrace c = power_trace(b.normalized, build_pt_charger(M_PI - 0.4, 3), g, 5.0, 200);
  for (std::size_t i = 0; i < a.power.size(); ++i) CHECK(std::abs(a.power[i] - c.power[i]) < 1e-12);
}

TEST_CASE("delta_p_max") {
  SUBCASE("identical chargers") {
    const PreparedBattery b = xx_battery(1, 1, 2);
    const DeltaRecord d = delta_p_max(b.normalized, build_pt_charger(0.0, 2),
                                      build_pt_hermitian_charger(0.0, 2), ground_state(b.normalized));
    CHECK(d.delta == 0.0);
    CHECK(d.delta == d.p_max_nonhermitian - d.p_max_hermitian);
  }
  SUBCASE("PT advantage across J at N = 2") {
    ChargerSpec pt;
    pt.kind = ChargerKind::pt;
    pt.alpha = M_PI / 3;
    ChargerSpec herm = pt;
    herm.kind = ChargerKind::pt_hermitian;
    for (double J : {-1.9, -1.0, 0.0, 1.0, 1.9}) {
      BatterySpec s;
      s.J = J;
      s.h = 1.0;
      const DeltaRecord d = delta_p_max(s, pt, herm, InitialCondition{}, 10.0, 2000);
      CHECK(d.delta > 0.0);
    }
  }
  SUBCASE("RT sign change with h at N = 2") {
    const BatteryModel battery = NonInteractingBattery{2};
    CHECK(delta_p_max(battery, rt_spec(0.5, 0.5, 2, false), rt_spec(0.5, 0.5, 2, true), {}).delta >
          0.0);
    CHECK(delta_p_max(battery, rt_spec(0.5, 1.5, 2, false), rt_spec(0.5, 1.5, 2, true), {}).delta <
          0.0);
  }
  CHECK_THROWS(delta_p_max(xx_battery(1, 1, 2).normalized, build_pt_charger(0.3, 3),
                           build_pt_hermitian_charger(0.3, 3),
                           ground_state(xx_battery(1, 1, 2).normalized)));
}

TEST_CASE("initial conditions") {
  BatterySpec s;
  s.J = 0.5;
  s.h = 2.0;
  s.n_sites = 3;
  const PreparedBattery b = prepare_battery(s);
  CHECK(b.energy_unit == 2.0);
  const QuantumState th = prepare_initial_state(b, {InitKind::thermal, 1.5});
  Operator scaled = b.raw;
  scaled.matrix *= cplx{0.5};
  CHECK(distance(th.matrix(), thermal_state(scaled, 1.5).matrix()) < 1e-14);
  const QuantumState inf = prepare_initial_state(b, {InitKind::thermal, kInfiniteBeta});
  CHECK(distance(inf.matrix(), ground_state(b.normalized).to_density()) < 1e-12);
  CHECK(prepare_initial_state(b, {InitKind::ground, 0.0}).is_pure_vector());

  BatterySpec degenerate;
  degenerate.J = 1.0;
  degenerate.h = 1.0;
  degenerate.n_sites = 4;
  const PreparedBattery d = prepare_battery(degenerate);
  CHECK_THROWS_AS(prepare_initial_state(d, {InitKind::ground, 0.0}), DegenerateGroundStateError);
  CHECK(prepare_initial_state(d, {InitKind::ground_projector, 0.0}).purity() < 1.0);
}

TEST_CASE("evolved states stay valid") {
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 2 + trial % 3;
    const PreparedBattery b = xx_battery(-1.5 + 3.0 * u(rng), 1.0, n);
    const QuantumState rho0 = thermal_state(b.normalized, 3.0 * u(rng));
    const Operator ch = trial % 2 ? build_pt_charger(M_PI * u(rng), n)
                                  : build_charger(rt_spec(u(rng), 1.5 * u(rng), n, false));
    const double t = 10.0 * u(rng);
    check_valid_density(evolve_normalized(ch, rho0, t).matrix());
    const QuantumState pure = QuantumState::pure(qbattery::testing::random_vector(1 << n, rng));
    CHECK(std::abs(evolve_normalized(ch, pure, t).to_density().frobenius_norm() - 1.0) < 1e-10);
  }
}
