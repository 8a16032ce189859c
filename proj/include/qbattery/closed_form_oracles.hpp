#pragma once

#include "qbattery/matrix.hpp"

// Closed-form two-site results used to cross-check the numerical pipeline.
//
// PT side: XX battery (J, h) with |J| <= 2h, normalized by E_max - E_min = 2h,
// initial state |11> (basis index 3), charger sum_r [X_r + i sin(a) Z_r] or its
// Hermitian partner.
//
// RT side: normalized non-interacting battery X_1 + X_2, initial state
// (1, -1, -1, 1)/2, charger the two-site XY chain with J = 1, field h, and
// anisotropy i*gamma' (RT) or gamma' (Hermitian).
//
// The *_as_printed variants are alternative transcriptions that
// disagree with direct evolution; they are kept so the discrepancy can be
// reported, never used as oracles.
//
// All functions throw DomainError at singular parameters; the numerical
// propagator is the authority there.

namespace qbattery::oracle {

enum class Branch {
  pt_state,
  pt_power,
  pt_herm_power,
  rt_state,
  rt_power_sub,    // gamma'^2 < 4h^2, trigonometric
  rt_power_super,  // gamma'^2 > 4h^2, hyperbolic
  rt_herm_power
};

/// Unit-norm evolved state under the PT charger.
CVector pt_state_n2(double alpha, double t);
CVector pt_state_n2_as_printed(double alpha, double t);

double pt_power_n2(double t, double h, double J, double alpha);
double pt_herm_power_n2(double t, double h, double J, double alpha);
/// Equals (2W - 1)/t rather than W/t.
double pt_herm_power_n2_as_printed(double t, double h, double J, double alpha);

/// (A, B, B, C)/sqrt(N); unit norm.
CVector rt_state_n2(double gamma, double h, double t);

Branch rt_power_branch(double gamma_prime, double h);
double rt_power_n2(double t, double gamma_prime, double h);
double rt_herm_power_n2(double t, double gamma_prime, double h);
/// The super-threshold form as printed starts with 1 instead of 1/t.
double rt_power_n2_as_printed(double t, double gamma_prime, double h);
double rt_herm_power_n2_as_printed(double t, double gamma_prime, double h);

}  // namespace qbattery::oracle
