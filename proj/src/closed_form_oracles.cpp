#include "qbattery/closed_form_oracles.hpp"

#include <cmath>
#include <string>

#include "qbattery/errors.hpp"

namespace qbattery::oracle {

namespace {

constexpr double kSingular = 1e-14;
constexpr double kBranchPoint = 1e-12;

void require_positive_time(double t, const char* where) {
  if (!(t > 0.0)) throw DomainError(std::string(where) + ": t must be > 0");
}

void require_field(double h, const char* where) {
  if (h == 0.0) throw DomainError(std::string(where) + ": h must be nonzero");
}

void require_not_ep(double alpha, const char* where) {
  if (std::abs(std::cos(alpha)) < kSingular) {
    throw DomainError(std::string(where) +
                      ": cos(alpha) = 0 (exceptional point); use the numeric propagator");
  }
}

CVector normalized(CVector v) {
  const double n = norm(v);
  for (auto& x : v) x /= n;
  return v;
}

}  // namespace

CVector pt_state_n2(double alpha, double t) {
  require_not_ep(alpha, "pt_state_n2");
  const double ca = std::cos(alpha);
  const double s = std::sin(t * ca);
  const double c = std::cos(alpha + t * ca);
  const double d = s * s + c * c;
  if (d < kSingular) throw DomainError("pt_state_n2: vanishing normalization");
  const double scale = ca * ca / (d * d);
  return normalized({cplx{-scale * s * s}, cplx{0.0, -scale * s * c}, cplx{0.0, -scale * s * c},
                     cplx{scale * c * c}});
}

CVector pt_state_n2_as_printed(double alpha, double t) {
  require_not_ep(alpha, "pt_state_n2_as_printed");
  const double ca = std::cos(alpha);
  const double s = std::sin(t * ca);
  const double c = std::cos(alpha + t * ca);
  if (std::abs(s) < kSingular || std::abs(c) < kSingular) {
    throw DomainError("pt_state_n2_as_printed: csc/sec singularity");
  }
  const double csc = 1.0 / s;
  const double sec = 1.0 / c;
  const double c2 = ca * ca;
  const double v0 = -(c2 * csc * csc) /
                    (std::pow(c, 4) * std::pow(csc, 4) + c * c * csc * csc + 1.0);
  const double v1 = -(c2 * c * s) / (std::pow(c, 4) + 2.0 * s * s * c * c + std::pow(s, 4));
  const double v3 = c2 / (sec * sec * std::pow(s, 4) + s * s + c * c);
  return {cplx{v0}, cplx{0.0, v1}, cplx{0.0, v1}, cplx{v3}};
}

double pt_power_n2(double t, double h, double J, double alpha) {
  require_positive_time(t, "pt_power_n2");
  require_field(h, "pt_power_n2");
  const double ca = std::cos(alpha);
  const double c2 = std::pow(std::cos(alpha + t * ca), 2);
  const double s2 = std::pow(std::sin(t * ca), 2);
  const double den = h * t * (c2 * c2 + 2.0 * c2 * s2 + s2 * s2);
  if (std::abs(den) < kSingular) {
    throw DomainError("pt_power_n2: vanishing denominator (exceptional point or t -> 0)");
  }
  return (-h * c2 * c2 + h * s2 * s2 + J * c2 * s2) / den + 1.0 / t;
}

namespace {

double pt_herm_numerator(double t, double h, double J, double alpha) {
  const double c2a = std::cos(2.0 * alpha);
  const double c4a = std::cos(4.0 * alpha);
  const double w = std::sqrt(6.0 - 2.0 * c2a);
  return -h * c4a + c2a * (8.0 * h - 2.0 * J) +
         std::cos(t * w) * (c2a * (4.0 * h + 2.0 * J) - 12.0 * h - 2.0 * J) - 7.0 * h -
         J * std::cos(2.0 * t * w) + 3.0 * J;
}

}  // namespace

double pt_herm_power_n2(double t, double h, double J, double alpha) {
  require_positive_time(t, "pt_herm_power_n2");
  require_field(h, "pt_herm_power_n2");
  // 19 + cos4a - 12 cos2a = 2 (cos2a - 3)^2 >= 8, never singular.
  const double den = h * t * (-12.0 * std::cos(2.0 * alpha) + std::cos(4.0 * alpha) + 19.0);
  return pt_herm_numerator(t, h, J, alpha) / den + 1.0 / t;
}

double pt_herm_power_n2_as_printed(double t, double h, double J, double alpha) {
  require_positive_time(t, "pt_herm_power_n2_as_printed");
  require_field(h, "pt_herm_power_n2_as_printed");
  const double den = h * t * (-6.0 * std::cos(2.0 * alpha) + 0.5 * std::cos(4.0 * alpha) + 9.5);
  return pt_herm_numerator(t, h, J, alpha) / den + 1.0 / t;
}

CVector rt_state_n2(double gamma, double h, double t) {
  const double disc = gamma * gamma - 4.0 * h * h;
  if (std::abs(disc) < kBranchPoint) {
    throw DomainError("rt_state_n2: branch point gamma^2 = 4h^2; use the numeric propagator");
  }
  // Principal complex root: below threshold sinh/cosh of imaginary arguments
  // become sin/cos automatically.
  const cplx q = std::sqrt(cplx{disc});
  const cplx sh = std::sinh(0.5 * t * q);
  const cplx ch = std::cosh(0.5 * t * q);
  const cplx a = gamma * sh / (2.0 * q) + 0.5 * (ch - 2.0 * kI * h * sh / q);
  const cplx b = -0.5 * std::cos(0.5 * t) + 0.5 * kI * std::sin(0.5 * t);
  const cplx c = gamma * sh / (2.0 * q) + 0.5 * (ch + 2.0 * kI * h * sh / q);
  const cplx n = (gamma * q * std::sinh(t * q) + gamma * gamma * std::cosh(t * q) + gamma * gamma -
                  8.0 * h * h) /
                 (2.0 * gamma * gamma - 8.0 * h * h);
  if (!(n.real() > kSingular)) throw DomainError("rt_state_n2: non-positive normalization");
  const double inv = 1.0 / std::sqrt(n.real());
  return {a * inv, b * inv, b * inv, c * inv};
}

Branch rt_power_branch(double gamma_prime, double h) {
  const double disc = gamma_prime * gamma_prime - 4.0 * h * h;
  if (std::abs(disc) < kBranchPoint) {
    throw DomainError("rt_power_n2: branch point gamma'^2 = 4h^2; use the numeric propagator");
  }
  return disc < 0.0 ? Branch::rt_power_sub : Branch::rt_power_super;
}

namespace {

// Returns the fraction term of the RT power; the two branches differ
// only in this term and the constant in front.
double rt_fraction(double t, double g, double h, Branch branch) {
  double num = 0.0;
  double den = 0.0;
  if (branch == Branch::rt_power_sub) {
    const double q = std::sqrt(4.0 * h * h - g * g);
    num = 2.0 * std::cos(0.5 * t) *
          ((g * g - 4.0 * h * h) * std::cos(0.5 * t * q) - g * q * std::sin(0.5 * t * q));
    den = std::cos(q * t) * g * g + g * g - q * std::sin(q * t) * g - 8.0 * h * h;
  } else {
    const double q = std::sqrt(g * g - 4.0 * h * h);
    num = 2.0 * std::cos(0.5 * t) *
          (g * q * std::sinh(0.5 * t * q) + (g * g - 4.0 * h * h) * std::cosh(0.5 * t * q));
    den = std::cosh(q * t) * g * g + g * g + q * std::sinh(q * t) * g - 8.0 * h * h;
  }
  if (std::abs(den) < kSingular) throw DomainError("rt_power_n2: vanishing |denominator|");
  return num / (t * std::abs(den));
}

}  // namespace

double rt_power_n2(double t, double gamma_prime, double h) {
  require_positive_time(t, "rt_power_n2");
  const Branch branch = rt_power_branch(gamma_prime, h);
  const double frac = rt_fraction(t, gamma_prime, h, branch);
  return branch == Branch::rt_power_sub ? frac + 1.0 / t : 1.0 / t - frac;
}

double rt_power_n2_as_printed(double t, double gamma_prime, double h) {
  require_positive_time(t, "rt_power_n2_as_printed");
  const Branch branch = rt_power_branch(gamma_prime, h);
  const double frac = rt_fraction(t, gamma_prime, h, branch);
  return branch == Branch::rt_power_sub ? frac + 1.0 / t : 1.0 - frac;
}

namespace {

double rt_herm_bracket(double t, double g, double h) {
  const double q2 = g * g + 4.0 * h * h;
  if (q2 == 0.0) throw DomainError("rt_herm_power_n2: gamma'^2 + 4h^2 = 0");
  const double q = std::sqrt(q2);
  return g * std::sin(0.5 * t) * std::sin(0.5 * t * q) / q +
         std::cos(0.5 * t) * std::cos(0.5 * t * q);
}

}  // namespace

double rt_herm_power_n2(double t, double gamma_prime, double h) {
  require_positive_time(t, "rt_herm_power_n2");
  return (1.0 - rt_herm_bracket(t, gamma_prime, h)) / t;
}

double rt_herm_power_n2_as_printed(double t, double gamma_prime, double h) {
  require_positive_time(t, "rt_herm_power_n2_as_printed");
  return 1.0 - rt_herm_bracket(t, gamma_prime, h) / t;
}

}  // namespace qbattery::oracle
