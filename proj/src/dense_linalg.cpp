#include "qbattery/dense_linalg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "qbattery/errors.hpp"

namespace qbattery {

namespace {

// Degree-13 Pade coefficients and the matching one-norm bound.
constexpr std::array<double, 14> kPade13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
    129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
    1323241920.0,        40840800.0,          960960.0,           16380.0,
    182.0,               1.0};
constexpr double kTheta13 = 5.371920351148152;

constexpr double kEps = std::numeric_limits<double>::epsilon();

// a*x + b*y + c*z + d*I
CMatrix combine(double a, const CMatrix& x, double b, const CMatrix& y, double c,
                const CMatrix& z, double d) {
  const std::size_t n = x.dim();
  CMatrix out(n);
  auto o = out.data();
  const auto xd = x.data();
  const auto yd = y.data();
  const auto zd = z.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = a * xd[i] + b * yd[i] + c * zd[i];
  for (std::size_t i = 0; i < n; ++i) out(i, i) += d;
  return out;
}

}  // namespace

CMatrix solve(const CMatrix& a, const CMatrix& b) {
  const std::size_t n = a.dim();
  if (b.dim() != n) throw std::invalid_argument("solve: dimension mismatch");
  CMatrix lu = a;
  CMatrix x = b;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(lu(k, k));
    for (std::size_t r = k + 1; r < n; ++r) {
      const double v = std::abs(lu(r, k));
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (best == 0.0) throw NumericRangeError("solve: matrix is singular");
    if (piv != k) {
      std::swap_ranges(lu.row(k).begin(), lu.row(k).end(), lu.row(piv).begin());
      std::swap_ranges(x.row(k).begin(), x.row(k).end(), x.row(piv).begin());
    }
    const cplx inv = 1.0 / lu(k, k);
    for (std::size_t r = k + 1; r < n; ++r) {
      const cplx f = lu(r, k) * inv;
      if (f == cplx{}) continue;
      lu(r, k) = f;
      for (std::size_t c = k + 1; c < n; ++c) lu(r, c) -= f * lu(k, c);
      for (std::size_t c = 0; c < n; ++c) x(r, c) -= f * x(k, c);
    }
  }
  for (std::size_t k = n; k-- > 0;) {
    const cplx inv = 1.0 / lu(k, k);
    for (std::size_t c = 0; c < n; ++c) {
      cplx s = x(k, c);
      for (std::size_t j = k + 1; j < n; ++j) s -= lu(k, j) * x(j, c);
      x(k, c) = s * inv;
    }
  }
  return x;
}

CMatrix matrix_exponential(const CMatrix& m, cplx scale) {
  if (!m.all_finite() || !std::isfinite(scale.real()) || !std::isfinite(scale.imag())) {
    throw PreconditionError("matrix_exponential: non-finite input");
  }
  const std::size_t n = m.dim();
  CMatrix a = m * scale;
  const double norm1 = a.one_norm();
  if (!std::isfinite(norm1)) throw NumericRangeError("matrix_exponential: ||scale*M|| overflows");
  if (norm1 == 0.0) return CMatrix::identity(n);

  int squarings = 0;
  if (norm1 > kTheta13) {
    squarings = static_cast<int>(std::ceil(std::log2(norm1 / kTheta13)));
    a *= std::ldexp(1.0, -squarings);
  }

  const auto& b = kPade13;
  const CMatrix a2 = a * a;
  const CMatrix a4 = a2 * a2;
  const CMatrix a6 = a4 * a2;

  CMatrix u_inner = a6 * combine(b[13], a6, b[11], a4, b[9], a2, 0.0);
  u_inner += combine(b[7], a6, b[5], a4, b[3], a2, b[1]);
  const CMatrix u = a * u_inner;

  CMatrix v = a6 * combine(b[12], a6, b[10], a4, b[8], a2, 0.0);
  v += combine(b[6], a6, b[4], a4, b[2], a2, b[0]);

  CMatrix r = solve(v - u, v + u);
  for (int i = 0; i < squarings; ++i) r = r * r;

  if (!r.all_finite()) {
    throw NumericRangeError("matrix_exponential: result overflows (||scale*M||_1 = " +
                            std::to_string(norm1) + ")");
  }
  return r;
}

Operator matrix_exponential(const Operator& m, cplx scale) {
  Operator out{matrix_exponential(m.matrix, scale), m.n_sites, false};
  // exp(sH) is Hermitian for Hermitian H only when s is real.
  out.hermitian = m.hermitian && scale.imag() == 0.0;
  return out;
}

HermitianEigen hermitian_eig(const CMatrix& m) {
  const std::size_t n = m.dim();
  const double mnorm = m.frobenius_norm();
  if (!m.all_finite()) throw PreconditionError("hermitian_eig: non-finite input");
  if (hermiticity_residual(m) > 1e-10 * std::max(mnorm, std::numeric_limits<double>::min())) {
    throw PreconditionError("hermitian_eig: input is not Hermitian within 1e-10 ||M||");
  }

  CMatrix a = m;
  CMatrix v = CMatrix::identity(n);
  for (std::size_t i = 0; i < n; ++i) a(i, i) = a(i, i).real();

  const double threshold = 1e-13 * mnorm;
  constexpr int kMaxSweeps = 100;
  int sweep = 0;
  for (;; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::abs(a(p, q)));
    if (off <= threshold) break;
    if (sweep == kMaxSweeps) {
      throw ConvergenceError("hermitian_eig: no convergence after " +
                             std::to_string(kMaxSweeps) + " sweeps (dim " +
                             std::to_string(n) + ")");
    }
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const cplx apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag <= threshold * 1e-3) continue;
        // Remove the phase of a_pq, then apply a real Jacobi rotation.
        const cplx phase = apq / mag;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double theta = (aqq - app) / (2.0 * mag);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::hypot(theta, 1.0));
        const double c = 1.0 / std::hypot(t, 1.0);
        const double s = t * c;
        // G restricted to (p, q): [[c, s], [-s conj(phase), c conj(phase)]].
        const cplx gpp = c;
        const cplx gpq = s;
        const cplx gqp = -s * std::conj(phase);
        const cplx gqq = c * std::conj(phase);
        for (std::size_t k = 0; k < n; ++k) {
          const cplx akp = a(k, p);
          const cplx akq = a(k, q);
          a(k, p) = akp * gpp + akq * gqp;
          a(k, q) = akp * gpq + akq * gqq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const cplx apk = a(p, k);
          const cplx aqk = a(q, k);
          a(p, k) = std::conj(gpp) * apk + std::conj(gqp) * aqk;
          a(q, k) = std::conj(gpq) * apk + std::conj(gqq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = app - t * mag;
        a(q, q) = aqq + t * mag;
        for (std::size_t k = 0; k < n; ++k) {
          const cplx vkp = v(k, p);
          const cplx vkq = v(k, q);
          v(k, p) = vkp * gpp + vkq * gqp;
          v(k, q) = vkp * gpq + vkq * gqq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return a(i, i).real() < a(j, j).real();
  });
  HermitianEigen out{RVector(n), CMatrix(n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]).real();
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = v(r, order[k]);
  }
  return out;
}

namespace {

// Householder reduction to upper Hessenberg form (similarity, eigenvalues only).
void reduce_to_hessenberg(CMatrix& h) {
  const std::size_t n = h.dim();
  if (n < 3) return;
  CVector w(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    double alpha_norm = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) alpha_norm += std::norm(h(i, k));
    alpha_norm = std::sqrt(alpha_norm);
    if (alpha_norm == 0.0) continue;
    const cplx x0 = h(k + 1, k);
    const cplx phase = std::abs(x0) == 0.0 ? cplx{1.0} : x0 / std::abs(x0);
    // w = x + phase*|x| e1, reflector P = I - 2 w w^H / (w^H w)
    std::fill(w.begin(), w.end(), cplx{});
    for (std::size_t i = k + 1; i < n; ++i) w[i] = h(i, k);
    w[k + 1] += phase * alpha_norm;
    double wnorm2 = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) wnorm2 += std::norm(w[i]);
    if (wnorm2 == 0.0) continue;
    const double beta = 2.0 / wnorm2;
    // H <- P H
    for (std::size_t j = 0; j < n; ++j) {
      cplx s = 0.0;
      for (std::size_t i = k + 1; i < n; ++i) s += std::conj(w[i]) * h(i, j);
      s *= beta;
      for (std::size_t i = k + 1; i < n; ++i) h(i, j) -= w[i] * s;
    }
    // H <- H P
    for (std::size_t i = 0; i < n; ++i) {
      cplx s = 0.0;
      for (std::size_t j = k + 1; j < n; ++j) s += h(i, j) * w[j];
      s *= beta;
      for (std::size_t j = k + 1; j < n; ++j) h(i, j) -= s * std::conj(w[j]);
    }
    for (std::size_t i = k + 2; i < n; ++i) h(i, k) = 0.0;
  }
}

std::pair<cplx, cplx> eig2x2(cplx a, cplx b, cplx c, cplx d) {
  const cplx half_tr = 0.5 * (a + d);
  const cplx disc = std::sqrt(0.25 * (a - d) * (a - d) + b * c);
  return {half_tr + disc, half_tr - disc};
}

}  // namespace

CVector general_eigenvalues(const CMatrix& m) {
  if (!m.all_finite()) throw PreconditionError("general_eigenvalues: non-finite input");
  const std::size_t n = m.dim();
  CVector eig(n);
  if (n == 0) return eig;
  CMatrix h = m;
  reduce_to_hessenberg(h);
  const double hnorm = h.frobenius_norm();

  const std::size_t max_iter = 100 * n;
  std::size_t total_iter = 0;
  std::vector<cplx> cs(n);
  std::vector<cplx> sn(n);

  std::ptrdiff_t hi = static_cast<std::ptrdiff_t>(n) - 1;
  int iter_since_deflation = 0;
  while (hi >= 0) {
    // Find the start of the unreduced block ending at hi.
    std::ptrdiff_t lo = hi;
    while (lo > 0) {
      const double sub = std::abs(h(lo, lo - 1));
      const double diag = std::abs(h(lo, lo)) + std::abs(h(lo - 1, lo - 1));
      if (sub <= 1e-13 * diag || sub <= kEps * hnorm) {
        h(lo, lo - 1) = 0.0;
        break;
      }
      --lo;
    }
    if (lo == hi) {
      eig[hi] = h(hi, hi);
      --hi;
      iter_since_deflation = 0;
      continue;
    }
    if (lo == hi - 1) {
      const auto [l1, l2] = eig2x2(h(lo, lo), h(lo, hi), h(hi, lo), h(hi, hi));
      eig[lo] = l1;
      eig[hi] = l2;
      hi -= 2;
      iter_since_deflation = 0;
      continue;
    }
    if (++total_iter > max_iter) {
      throw ConvergenceError("general_eigenvalues: QR iteration did not converge for a " +
                             std::to_string(n) + "x" + std::to_string(n) + " matrix");
    }
    ++iter_since_deflation;

    cplx mu;
    if (iter_since_deflation % 11 == 10) {
      // Exceptional shift to break cycles.
      mu = h(hi, hi) + 0.75 * std::abs(h(hi, hi - 1));
    } else {
      const auto [l1, l2] = eig2x2(h(hi - 1, hi - 1), h(hi - 1, hi), h(hi, hi - 1), h(hi, hi));
      mu = std::abs(l1 - h(hi, hi)) < std::abs(l2 - h(hi, hi)) ? l1 : l2;
    }

    for (std::ptrdiff_t k = lo; k <= hi; ++k) h(k, k) -= mu;
    for (std::ptrdiff_t k = lo; k < hi; ++k) {
      const cplx a = h(k, k);
      const cplx b = h(k + 1, k);
      const double r = std::hypot(std::abs(a), std::abs(b));
      cplx c = 1.0;
      cplx s = 0.0;
      if (r != 0.0) {
        c = a / r;
        s = b / r;
      }
      cs[k] = c;
      sn[k] = s;
      for (std::ptrdiff_t j = k; j <= hi; ++j) {
        const cplx x = h(k, j);
        const cplx y = h(k + 1, j);
        h(k, j) = std::conj(c) * x + std::conj(s) * y;
        h(k + 1, j) = -s * x + c * y;
      }
    }
    for (std::ptrdiff_t k = lo; k < hi; ++k) {
      const cplx c = cs[k];
      const cplx s = sn[k];
      const std::ptrdiff_t rmax = std::min(k + 1, hi);
      for (std::ptrdiff_t i = lo; i <= rmax; ++i) {
        const cplx x = h(i, k);
        const cplx y = h(i, k + 1);
        h(i, k) = x * c + y * s;
        h(i, k + 1) = -x * std::conj(s) + y * std::conj(c);
      }
    }
    for (std::ptrdiff_t k = lo; k <= hi; ++k) h(k, k) += mu;
  }
  return eig;
}

int numerical_rank(const CMatrix& m, double tol) {
  const std::size_t n = m.dim();
  CMatrix a = m;
  std::vector<double> colnorm(n, 0.0);
  int rank = 0;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t c = k; c < n; ++c) {
      double s = 0.0;
      for (std::size_t r = k; r < n; ++r) s += std::norm(a(r, c));
      colnorm[c] = s;
    }
    std::size_t piv = k;
    for (std::size_t c = k + 1; c < n; ++c)
      if (colnorm[c] > colnorm[piv]) piv = c;
    if (std::sqrt(colnorm[piv]) <= tol) break;
    if (piv != k) {
      for (std::size_t r = 0; r < n; ++r) std::swap(a(r, k), a(r, piv));
      std::swap(colnorm[k], colnorm[piv]);
    }
    // Householder on column k, rows k..n-1.
    const double alpha = std::sqrt(colnorm[k]);
    const cplx x0 = a(k, k);
    const cplx phase = std::abs(x0) == 0.0 ? cplx{1.0} : x0 / std::abs(x0);
    CVector w(n - k);
    for (std::size_t r = k; r < n; ++r) w[r - k] = a(r, k);
    w[0] += phase * alpha;
    double wn2 = 0.0;
    for (const auto& x : w) wn2 += std::norm(x);
    if (wn2 > 0.0) {
      const double beta = 2.0 / wn2;
      for (std::size_t c = k; c < n; ++c) {
        cplx s = 0.0;
        for (std::size_t r = k; r < n; ++r) s += std::conj(w[r - k]) * a(r, c);
        s *= beta;
        for (std::size_t r = k; r < n; ++r) a(r, c) -= w[r - k] * s;
      }
    }
    ++rank;
  }
  return rank;
}

bool is_defective_at(const CMatrix& m, double cluster_tol) {
  const CVector eig = general_eigenvalues(m);
  const std::size_t n = eig.size();
  // Single-linkage clustering with union-find.
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(eig[i] - eig[j]) < cluster_tol) parent[find(i)] = find(j);

  std::vector<std::vector<std::size_t>> clusters(n);
  for (std::size_t i = 0; i < n; ++i) clusters[find(i)].push_back(i);

  const double scale = std::max(1.0, m.frobenius_norm());
  for (const auto& cl : clusters) {
    if (cl.size() < 2) continue;
    cplx centre = 0.0;
    for (std::size_t i : cl) centre += eig[i];
    centre /= static_cast<double>(cl.size());
    CMatrix shifted = m;
    for (std::size_t i = 0; i < n; ++i) shifted(i, i) -= centre;
    const int geometric = static_cast<int>(n) - numerical_rank(shifted, cluster_tol * scale);
    if (geometric < static_cast<int>(cl.size())) return true;
  }
  return false;
}

double max_imag(const CVector& eigenvalues) {
  double best = 0.0;
  for (const auto& l : eigenvalues) best = std::max(best, std::abs(l.imag()));
  return best;
}

bool is_real_spectrum(const CVector& eigenvalues) {
  double scale = 1.0;
  for (const auto& l : eigenvalues) scale = std::max(scale, std::abs(l));
  return max_imag(eigenvalues) < 1e-8 * scale;
}

}  // namespace qbattery
