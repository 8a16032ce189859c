#include "qbattery/model_builders.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "qbattery/dense_linalg.hpp"
#include "qbattery/errors.hpp"

namespace qbattery {

namespace {

const Operator& px() {
  static const Operator op = pauli(PauliAxis::x);
  return op;
}
const Operator& py() {
  static const Operator op = pauli(PauliAxis::y);
  return op;
}
const Operator& pz() {
  static const Operator op = pauli(PauliAxis::z);
  return op;
}

// sum over distinct bonds of cxx XX + cyy YY + czz ZZ, plus (field/2) sum Z.
CMatrix xyz_chain(cplx cxx, cplx cyy, cplx czz, double field, int n, Boundary boundary) {
  const std::size_t dim = std::size_t{1} << n;
  CMatrix h(dim);
  const int bonds = bond_count(n, boundary);
  for (int r = 0; r < bonds; ++r) {
    if (cxx != cplx{}) h += two_site_term(px(), px(), r, n, boundary).matrix * cxx;
    if (cyy != cplx{}) h += two_site_term(py(), py(), r, n, boundary).matrix * cyy;
    if (czz != cplx{}) h += two_site_term(pz(), pz(), r, n, boundary).matrix * czz;
  }
  if (field != 0.0)
    for (int r = 0; r < n; ++r) h += embed_site(pz(), r, n).matrix * cplx{0.5 * field};
  return h;
}

void check_finite(double v, const char* name) {
  if (!std::isfinite(v)) throw std::invalid_argument(std::string(name) + " must be finite");
}

}  // namespace

Operator build_battery_xyz(const BatterySpec& spec) {
  if (spec.n_sites < 2) throw std::invalid_argument("build_battery_xyz: n_sites must be >= 2");
  check_finite(spec.J, "J");
  check_finite(spec.gamma, "gamma");
  check_finite(spec.delta, "delta");
  check_finite(spec.h, "h");
  CMatrix h = xyz_chain(spec.J / 4.0 * (1.0 + spec.gamma), spec.J / 4.0 * (1.0 - spec.gamma),
                        spec.delta / 4.0, spec.h, spec.n_sites, spec.boundary);
  return {std::move(h), spec.n_sites, true};
}

Operator build_noninteracting_battery(int n_sites) {
  if (n_sites < 1) throw std::invalid_argument("build_noninteracting_battery: n_sites must be >= 1");
  Operator h{CMatrix(std::size_t{1} << n_sites), n_sites, true};
  for (int r = 0; r < n_sites; ++r) h.matrix += embed_site(px(), r, n_sites).matrix;
  return h;
}

Operator normalize_spectrum(const Operator& h) {
  const HermitianEigen eig = hermitian_eig(h.matrix);
  const double e_min = eig.values.front();
  const double e_max = eig.values.back();
  const double span = e_max - e_min;
  const double scale = std::max({1.0, std::abs(e_min), std::abs(e_max)});
  if (!(span > 1e-12 * scale)) {
    throw DegenerateSpectrumError("normalize_spectrum: E_max == E_min (operator proportional to I)");
  }
  Operator out{h.matrix * cplx{2.0 / span}, h.n_sites, true};
  const double shift = (e_max + e_min) / span;
  for (std::size_t i = 0; i < out.dim(); ++i) out.matrix(i, i) -= shift;
  // Make the operator exactly Hermitian.
  for (std::size_t r = 0; r < out.dim(); ++r) {
    out.matrix(r, r) = out.matrix(r, r).real();
    for (std::size_t c = r + 1; c < out.dim(); ++c) {
      const cplx avg = 0.5 * (out.matrix(r, c) + std::conj(out.matrix(c, r)));
      out.matrix(r, c) = avg;
      out.matrix(c, r) = std::conj(avg);
    }
  }
  return out;
}

Operator build_pt_charger(double alpha, int n_sites) {
  check_finite(alpha, "alpha");
  if (n_sites < 1) throw std::invalid_argument("build_pt_charger: n_sites must be >= 1");
  const double s = std::sin(alpha);
  Operator h{CMatrix(std::size_t{1} << n_sites), n_sites, s == 0.0};
  for (int r = 0; r < n_sites; ++r) {
    h.matrix += embed_site(px(), r, n_sites).matrix;
    if (s != 0.0) h.matrix += embed_site(pz(), r, n_sites).matrix * (kI * s);
  }
  return h;
}

Operator build_pt_hermitian_charger(double alpha, int n_sites) {
  check_finite(alpha, "alpha");
  if (n_sites < 1) throw std::invalid_argument("build_pt_hermitian_charger: n_sites must be >= 1");
  const double s = std::sin(alpha);
  Operator h{CMatrix(std::size_t{1} << n_sites), n_sites, true};
  for (int r = 0; r < n_sites; ++r) {
    h.matrix += embed_site(px(), r, n_sites).matrix;
    if (s != 0.0) h.matrix += embed_site(pz(), r, n_sites).matrix * cplx{s};
  }
  return h;
}

Operator build_rt_charger(const ChargerSpec& spec) {
  if (spec.kind != ChargerKind::rt && spec.kind != ChargerKind::rt_hermitian) {
    throw std::invalid_argument("build_rt_charger: kind must be RT or RT_HERMITIAN");
  }
  if (spec.n_sites < 2) throw std::invalid_argument("build_rt_charger: n_sites must be >= 2");
  check_finite(spec.gamma_prime, "gamma_prime");
  check_finite(spec.J, "J");
  check_finite(spec.h_prime, "h_prime");
  // RT uses anisotropy i*gamma'; the Hermitian partner substitutes gamma = -i gamma',
  // i.e. i*gamma = gamma', giving the real-anisotropy XY chain.
  const cplx aniso = spec.kind == ChargerKind::rt ? kI * spec.gamma_prime : cplx{spec.gamma_prime};
  CMatrix h = xyz_chain(spec.J / 4.0 * (1.0 + aniso), spec.J / 4.0 * (1.0 - aniso), 0.0,
                        spec.h_prime, spec.n_sites, spec.boundary);
  const bool herm = spec.kind == ChargerKind::rt_hermitian || spec.gamma_prime == 0.0 || spec.J == 0.0;
  return {std::move(h), spec.n_sites, herm};
}

Operator build_charger(const ChargerSpec& spec) {
  switch (spec.kind) {
    case ChargerKind::pt:
      return build_pt_charger(spec.alpha, spec.n_sites);
    case ChargerKind::pt_hermitian:
      return build_pt_hermitian_charger(spec.alpha, spec.n_sites);
    case ChargerKind::rt:
    case ChargerKind::rt_hermitian:
      return build_rt_charger(spec);
  }
  throw std::invalid_argument("build_charger: unknown kind");
}

double check_antilinear_symmetry(const Operator& h, SymmetryKind kind) {
  const int n = h.n_sites;
  const std::size_t dim = h.dim();
  if (dim != (std::size_t{1} << n)) {
    throw std::invalid_argument("check_antilinear_symmetry: dim != 2^n_sites");
  }
  const double hnorm = h.matrix.frobenius_norm();
  if (hnorm == 0.0) return 0.0;
  const CMatrix hc = h.matrix.conjugate();
  CMatrix transformed(dim);
  if (kind == SymmetryKind::pt) {
    // prod_r X_r flips every bit: S_{b, b xor all} = 1, S^-1 = S.
    const std::size_t all = dim - 1;
    for (std::size_t r = 0; r < dim; ++r)
      for (std::size_t c = 0; c < dim; ++c) transformed(r, c) = hc(r ^ all, c ^ all);
  } else {
    // R = exp[-i (pi/4) sum Z] is diagonal with phases exp(-i pi/4 * m_b), m_b = sum of z eigenvalues.
    CVector phase(dim);
    for (std::size_t b = 0; b < dim; ++b) {
      int m = 0;
      for (int r = 0; r < n; ++r) m += ((b >> r) & 1U) ? -1 : 1;
      phase[b] = std::polar(1.0, -M_PI / 4.0 * m);
    }
    for (std::size_t r = 0; r < dim; ++r)
      for (std::size_t c = 0; c < dim; ++c) transformed(r, c) = phase[r] * hc(r, c) * std::conj(phase[c]);
  }
  return distance(transformed, h.matrix) / hnorm;
}

Phase classify_phase(const Operator& h) {
  if (!h.matrix.all_finite()) throw PreconditionError("classify_phase: non-finite operator");
  return is_real_spectrum(general_eigenvalues(h.matrix)) ? Phase::unbroken_real
                                                          : Phase::broken_complex;
}

}  // namespace qbattery
