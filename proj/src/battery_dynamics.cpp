#include "qbattery/battery_dynamics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

#include "qbattery/dense_linalg.hpp"
#include "qbattery/errors.hpp"

namespace qbattery {

namespace {

constexpr double kUnderflow = 1e-300;
constexpr double kImagTol = 1e-10;
// Mixture weights below this fraction of the largest cannot move any observable
// above round-off and are dropped from the factorized propagation.
constexpr double kRankCut = 1e-20;
constexpr std::size_t kLowRankRatio = 4;

void check_dims(const Operator& a, const QuantumState& s, const char* where) {
  if (a.dim() != s.dim()) {
    throw std::invalid_argument(std::string(where) + ": dimension mismatch (" +
                                std::to_string(a.dim()) + " vs " + std::to_string(s.dim()) + ")");
  }
}

double real_energy(const CMatrix& h, const QuantumState& s) {
  const cplx e = s.expectation(h);
  if (std::abs(e.imag()) >= kImagTol) {
    throw ConsistencyError("energy has imaginary residue " + std::to_string(e.imag()));
  }
  return e.real();
}

double passive_energy(const RVector& spectrum, const QuantumState& rho) {
  if (rho.is_pure_vector()) return spectrum.front();
  CMatrix m = rho.matrix();
  for (std::size_t r = 0; r < m.dim(); ++r) {
    m(r, r) = m(r, r).real();
    for (std::size_t c = r + 1; c < m.dim(); ++c) {
      const cplx avg = 0.5 * (m(r, c) + std::conj(m(c, r)));
      m(r, c) = avg;
      m(c, r) = std::conj(avg);
    }
  }
  RVector pops = hermitian_eig(m).values;
  std::sort(pops.begin(), pops.end(), std::greater<>());
  double e = 0.0;
  for (std::size_t i = 0; i < pops.size(); ++i) e += pops[i] * spectrum[i];
  return e;
}

// Golden-section maximization of f on [a, b] down to width tol.
template <typename F>
std::pair<double, double> golden_max(F&& f, double a, double b, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {  // ties move toward smaller t
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? std::pair{c, fc} : std::pair{d, fd};
}

}  // namespace

Propagated propagate(const CMatrix& k, const QuantumState& rho0) {
  if (k.dim() != rho0.dim()) throw std::invalid_argument("propagate: dimension mismatch");
  if (rho0.is_pure_vector()) {
    CVector v = k * std::span<const cplx>(rho0.vector());
    const double n2 = std::pow(norm(v), 2);
    if (!(n2 >= kUnderflow)) {
      throw NormalizationUnderflowError("propagate: ||K psi||^2 = " + std::to_string(n2) +
                                        " below 1e-300");
    }
    return {QuantumState::pure(std::move(v)), n2};
  }
  CMatrix rho = k * rho0.matrix() * k.adjoint();
  const double tr = rho.trace().real();
  if (!(tr >= kUnderflow)) {
    throw NormalizationUnderflowError("propagate: tr(K rho K^dagger) = " + std::to_string(tr) +
                                      " below 1e-300");
  }
  return {QuantumState::density(std::move(rho)), tr};
}

QuantumState evolve_normalized(const Operator& h_charge, const QuantumState& rho0, double t) {
  check_dims(h_charge, rho0, "evolve_normalized");
  if (!(t >= 0.0)) throw std::invalid_argument("evolve_normalized: t must be >= 0");
  if (t == 0.0) return rho0;
  return propagate(matrix_exponential(h_charge.matrix, cplx{0.0, -t}), rho0).state;
}

double work(const Operator& h_b, const QuantumState& rho0, const QuantumState& rho_t) {
  check_dims(h_b, rho0, "work");
  check_dims(h_b, rho_t, "work");
  const cplx w = rho_t.expectation(h_b.matrix) - rho0.expectation(h_b.matrix);
  if (std::abs(w.imag()) >= kImagTol) {
    throw ConsistencyError("work: imaginary residue " + std::to_string(w.imag()));
  }
  return w.real();
}

double ergotropy(const Operator& h_b, const RVector& battery_spectrum, const QuantumState& rho) {
  check_dims(h_b, rho, "ergotropy");
  return real_energy(h_b.matrix, rho) - passive_energy(battery_spectrum, rho);
}

double ergotropy(const Operator& h_b, const QuantumState& rho) {
  return ergotropy(h_b, hermitian_eig(h_b.matrix).values, rho);
}

void for_each_grid_state(const Operator& h_charge, const QuantumState& rho0, double dt,
                         int n_steps,
                         const std::function<void(int, const QuantumState&)>& visit) {
  check_dims(h_charge, rho0, "for_each_grid_state");
  if (n_steps < 1) return;
  if (!(dt > 0.0)) throw std::invalid_argument("for_each_grid_state: dt must be > 0");
  const int levels = std::bit_width(static_cast<unsigned>(n_steps));
  std::vector<CMatrix> factors;
  factors.reserve(levels);
  for (int j = 0; j < levels; ++j) {
    factors.push_back(matrix_exponential(h_charge.matrix, cplx{0.0, -dt * std::ldexp(1.0, j)}));
  }
  std::vector<CVector> columns;
  if (!rho0.is_pure_vector()) {
    // rho = Phi Phi^dagger with one column per retained eigenvector.
    const HermitianEigen eig = hermitian_eig(rho0.matrix());
    const double w_max = *std::max_element(eig.values.begin(), eig.values.end());
    for (std::size_t k = 0; k < rho0.dim(); ++k) {
      if (!(eig.values[k] > kRankCut * w_max)) continue;
      const double s = std::sqrt(eig.values[k]);
      CVector col(rho0.dim());
      for (std::size_t r = 0; r < rho0.dim(); ++r) col[r] = s * eig.vectors(r, k);
      columns.push_back(std::move(col));
    }
  }
  // Low-rank mixtures (ground-space projectors) cost r matvecs per node instead
  // of two dense products.
  if (!rho0.is_pure_vector() && columns.size() * kLowRankRatio <= rho0.dim()) {
    const std::size_t n = rho0.dim();
    auto to_state = [&](const std::vector<CVector>& cols) {
      CMatrix rho(n);
      for (const auto& c : cols) {
        for (std::size_t r = 0; r < n; ++r) {
          const cplx cr = c[r];
          cplx* row = &rho(r, 0);
          for (std::size_t q = 0; q < n; ++q) row[q] += cr * std::conj(c[q]);
        }
      }
      return QuantumState::density(std::move(rho));
    };
    auto step = [&](const CMatrix& k, const std::vector<CVector>& cols) {
      std::vector<CVector> out;
      out.reserve(cols.size());
      double total = 0.0;
      for (const auto& c : cols) {
        out.push_back(k * std::span<const cplx>(c));
        total += std::pow(norm(out.back()), 2);
      }
      if (!(total >= kUnderflow)) {
        throw NormalizationUnderflowError("propagate: tr(K rho K^dagger) = " +
                                          std::to_string(total) + " below 1e-300");
      }
      const double inv = 1.0 / std::sqrt(total);
      for (auto& c : out)
        for (auto& x : c) x *= inv;
      return out;
    };
    auto recurse = [&](auto&& self, int level, int value,
                       const std::vector<CVector>& cols) -> void {
      if (level < 0) {
        if (value >= 1) visit(value, to_state(cols));
        return;
      }
      self(self, level - 1, value, cols);
      const int with_bit = value | (1 << level);
      if (with_bit > n_steps) return;
      self(self, level - 1, with_bit, step(factors[level], cols));
    };
    recurse(recurse, levels - 1, 0, columns);
    return;
  }
  // Depth-first over the bits of k, most significant first; a set bit applies
  // its factor to the parent's (renormalized) state.
  auto recurse = [&](auto&& self, int level, int value, const QuantumState& state) -> void {
    if (level < 0) {
      if (value >= 1) visit(value, state);
      return;
    }
    self(self, level - 1, value, state);
    const int with_bit = value | (1 << level);
    if (with_bit > n_steps) return;
    const QuantumState next = propagate(factors[level], state).state;
    self(self, level - 1, with_bit, next);
  };
  recurse(recurse, levels - 1, 0, rho0);
}

PowerTrace power_trace(const Operator& h_b, const Operator& h_charge, const QuantumState& rho0,
                       double t_max, int n_grid, TraceOptions options) {
  check_dims(h_b, rho0, "power_trace");
  check_dims(h_charge, rho0, "power_trace");
  if (!(t_max > 0.0)) throw std::invalid_argument("power_trace: t_max must be > 0");
  if (n_grid < 16) throw std::invalid_argument("power_trace: n_grid must be >= 16");

  const double dt = t_max / n_grid;
  const double e0 = real_energy(h_b.matrix, rho0);
  RVector spectrum;
  if (options.ergotropy) spectrum = hermitian_eig(h_b.matrix).values;

  PowerTrace trace;
  trace.times.resize(n_grid);
  trace.work.resize(n_grid);
  trace.power.resize(n_grid);
  if (options.ergotropy) trace.ergotropy.resize(n_grid);

  for_each_grid_state(h_charge, rho0, dt, n_grid, [&](int k, const QuantumState& s) {
    const std::size_t i = static_cast<std::size_t>(k - 1);
    const double t = dt * k;
    const double e = real_energy(h_b.matrix, s);
    trace.times[i] = t;
    trace.work[i] = e - e0;
    trace.power[i] = (e - e0) / t;
    if (options.ergotropy) trace.ergotropy[i] = e - passive_energy(spectrum, s);
  });

  std::size_t best = 0;
  for (std::size_t i = 1; i < trace.power.size(); ++i)
    if (trace.power[i] > trace.power[best]) best = i;
  trace.t_star = trace.times[best];
  trace.p_max = trace.power[best];

  if (options.refine) {
    auto power_at = [&](double t) {
      const QuantumState s = evolve_normalized(h_charge, rho0, t);
      return (real_energy(h_b.matrix, s) - e0) / t;
    };
    const double lo = best == 0 ? 0.5 * dt : trace.times[best - 1];
    const double hi = best + 1 < trace.times.size() ? trace.times[best + 1] : trace.times[best];
    if (hi > lo) {
      const auto [t_ref, p_ref] = golden_max(power_at, lo, hi, 1e-6);
      if (p_ref > trace.p_max) {
        trace.p_max = p_ref;
        trace.t_star = t_ref;
      }
    }
  }
  return trace;
}

DeltaRecord delta_p_max(const Operator& h_b, const Operator& nonhermitian,
                        const Operator& hermitian, const QuantumState& rho0, double t_max,
                        int n_grid) {
  if (nonhermitian.n_sites != hermitian.n_sites || nonhermitian.dim() != h_b.dim() ||
      hermitian.dim() != h_b.dim()) {
    throw std::invalid_argument("delta_p_max: chargers and battery must share n_sites");
  }
  const TraceOptions opts{.ergotropy = false, .refine = true};
  const PowerTrace a = power_trace(h_b, nonhermitian, rho0, t_max, n_grid, opts);
  const PowerTrace b = power_trace(h_b, hermitian, rho0, t_max, n_grid, opts);
  return {a.p_max, b.p_max, a.p_max - b.p_max, a.t_star, b.t_star};
}

PreparedBattery prepare_battery(const BatteryModel& model) {
  return std::visit(
      [](const auto& m) -> PreparedBattery {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, BatterySpec>) {
          Operator raw = build_battery_xyz(m);
          Operator normalized = normalize_spectrum(raw);
          return {std::move(raw), std::move(normalized), std::abs(m.h)};
        } else {
          Operator raw = build_noninteracting_battery(m.n_sites);
          Operator normalized = normalize_spectrum(raw);
          return {std::move(raw), std::move(normalized), 1.0};
        }
      },
      model);
}

QuantumState prepare_initial_state(const PreparedBattery& battery, const InitialCondition& init) {
  switch (init.kind) {
    case InitKind::ground:
      return ground_state(battery.normalized);
    case InitKind::ground_projector:
      return thermal_state(battery.normalized, kInfiniteBeta);
    case InitKind::thermal: {
      if (std::isinf(init.beta)) return thermal_state(battery.normalized, kInfiniteBeta);
      if (!(battery.energy_unit > 0.0)) {
        throw std::invalid_argument("thermal start needs a nonzero energy unit (h != 0)");
      }
      Operator scaled = battery.raw;
      scaled.matrix *= cplx{1.0 / battery.energy_unit};
      return thermal_state(scaled, init.beta);
    }
  }
  throw std::invalid_argument("prepare_initial_state: unknown init kind");
}

DeltaRecord delta_p_max(const BatteryModel& battery, const ChargerSpec& nonhermitian,
                        const ChargerSpec& hermitian, const InitialCondition& init,
                        double t_max, int n_grid) {
  const PreparedBattery b = prepare_battery(battery);
  const QuantumState rho0 = prepare_initial_state(b, init);
  return delta_p_max(b.normalized, build_charger(nonhermitian), build_charger(hermitian), rho0,
                     t_max, n_grid);
}

}  // namespace qbattery
