#include "qbattery/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <set>
#include <stdexcept>
#include <thread>

#include "qbattery/battery_dynamics.hpp"
#include "qbattery/errors.hpp"

#ifndef QBATTERY_VERSION
#define QBATTERY_VERSION "unknown"
#endif

namespace qbattery {

namespace {

const std::map<std::string, std::string> kPtParameters = {
    {"n_sites", "2"}, {"h", "1"},        {"J", ""},         {"J_over_h", ""},
    {"j_frac", ""},   {"gamma", "0"},    {"delta", ""},     {"delta_over_h", ""},
    {"alpha", "pi/3"}, {"boundary", "periodic"}, {"init", "ground"}, {"beta", "inf"},
};

const std::map<std::string, std::string> kRtParameters = {
    {"n_sites", "2"}, {"gamma_prime", ""}, {"h", ""}, {"h_herm", ""}, {"J", "1"},
    {"boundary", "periodic"}, {"init", "ground"}, {"beta", "inf"},
};

const std::map<std::string, std::string> kErgotropyParameters = {
    {"n_sites", "6"}, {"t", ""},         {"alpha", "2*pi/3"}, {"J", "0.5"},   {"h", "1"},
    {"gamma_prime", "0.1"}, {"h_rt", "1.5"}, {"boundary", "periodic"},
};

const std::vector<std::string> kCouplingGroup = {"J", "J_over_h", "j_frac"};
const std::set<std::string> kTextParameters = {"boundary", "init"};

std::map<std::string, std::string> with_default(std::map<std::string, std::string> m,
                                                const std::string& key, const std::string& v) {
  m[key] = v;
  return m;
}

const std::vector<ExperimentInfo>& registry() {
  using E = Experiment;
  const std::vector<std::string> pt2 = {"p_max_pt", "p_max_herm"};
  const std::vector<std::string> rt2 = {"p_max_rt", "p_max_herm"};
  static const std::vector<ExperimentInfo> infos = {
      {E::fig_ergotropy, Family::ergotropy,
       "work and ergotropy vs t for the PT (XX battery) and RT (non-interacting battery) chargers",
       {{"t"}}, kErgotropyParameters, {}, {"work_pt", "ergotropy_pt", "work_rt", "ergotropy_rt"},
       ""},
      {E::fig_pt_map, Family::pt, "delta P_max (PT - Hermitian) over field h and coupling J",
       {{"h"}, kCouplingGroup}, kPtParameters, {"J"}, {"p_max_pt", "p_max_herm", "delta"}, ""},
      {E::fig_pmax_vs_alpha, Family::pt, "P_max vs non-Hermiticity alpha", {{"alpha"}},
       kPtParameters, {}, pt2, ""},
      {E::fig_pmax_vs_J, Family::pt, "P_max vs battery coupling J", {kCouplingGroup},
       kPtParameters, {}, pt2, ""},
      {E::fig_scaling_N, Family::pt, "P_max vs system size N with power-law fit", {{"n_sites"}},
       kPtParameters, {}, pt2, "n_sites"},
      {E::fig_pmax_vs_gamma, Family::pt, "P_max vs battery anisotropy gamma", {{"gamma"}},
       kPtParameters, {}, pt2, ""},
      {E::fig_pmax_vs_delta, Family::pt, "P_max vs battery zz coupling delta",
       {{"delta", "delta_over_h"}}, kPtParameters, {}, pt2, ""},
      {E::fig_thermal_pt, Family::pt, "P_max vs inverse temperature, PT charger", {{"beta"}},
       with_default(kPtParameters, "init", "thermal"), {}, pt2, ""},
      {E::fig_rt_map, Family::rt, "delta P_max (RT - Hermitian) over gamma' and h",
       {{"gamma_prime"}, {"h"}}, kRtParameters, {}, {"p_max_rt", "p_max_herm", "delta"}, ""},
      {E::fig_rt_vs_gammaprime, Family::rt, "P_max vs charger anisotropy gamma'",
       {{"gamma_prime"}, {"h"}}, kRtParameters, {}, rt2, ""},
      {E::fig_rt_scaling_N, Family::rt, "RT P_max vs system size N with power-law fit",
       {{"n_sites"}, {"gamma_prime"}, {"h"}}, kRtParameters, {}, rt2, "n_sites"},
      {E::fig_thermal_rt, Family::rt, "P_max vs inverse temperature, RT charger",
       {{"beta"}, {"gamma_prime"}, {"h"}}, with_default(kRtParameters, "init", "thermal"), {},
       rt2, ""},
  };
  return infos;
}

// Parameter lookup for one tuple: ranged value, else fixed, else default.
class Tuple {
 public:
  Tuple(const SweepConfig& cfg, const ExperimentInfo& info, std::vector<double> ranged)
      : cfg_(cfg), info_(info), ranged_(std::move(ranged)) {}
  bool given(const std::string& name) const { return cfg_.has(name); }

  double num(const std::string& name) const {
    for (std::size_t i = 0; i < cfg_.ranges.size(); ++i)
      if (cfg_.ranges[i].name == name) return ranged_[i];
    if (auto it = cfg_.fixed.find(name); it != cfg_.fixed.end()) return parse_real(it->second);
    const std::string& d = info_.parameters.at(name);
    if (d.empty()) throw std::invalid_argument("parameter '" + name + "' has no value");
    return parse_real(d);
  }

  int integer(const std::string& name) const {
    const double v = num(name);
    if (std::abs(v - std::round(v)) > 1e-9) {
      throw std::invalid_argument(name + " must be an integer, got " + format_number(v));
    }
    return static_cast<int>(std::lround(v));
  }

  std::string text(const std::string& name) const {
    if (auto it = cfg_.fixed.find(name); it != cfg_.fixed.end()) return it->second;
    return info_.parameters.at(name);
  }

  std::string describe() const {
    std::string s = "(";
    for (std::size_t i = 0; i < cfg_.ranges.size(); ++i) {
      if (i) s += ", ";
      s += cfg_.ranges[i].name + " = " + format_number(ranged_[i]);
    }
    return s + ")";
  }

 private:
  const SweepConfig& cfg_;
  const ExperimentInfo& info_;
  std::vector<double> ranged_;
};

Boundary parse_boundary(const std::string& s) {
  if (s == "periodic") return Boundary::periodic;
  if (s == "open") return Boundary::open;
  throw std::invalid_argument("boundary must be 'periodic' or 'open', got '" + s + "'");
}

InitialCondition parse_init(const Tuple& p) {
  const std::string s = p.text("init");
  if (s == "ground") return {InitKind::ground, 0.0};
  if (s == "ground_projector") return {InitKind::ground_projector, 0.0};
  if (s == "thermal") {
    const double beta = p.num("beta");
    if (!(beta >= 0.0)) throw std::invalid_argument("beta must be >= 0");
    return {InitKind::thermal, beta};
  }
  throw std::invalid_argument("init must be ground, ground_projector or thermal; got '" + s + "'");
}

double pt_coupling(const Tuple& p, double h) {
  if (p.given("J")) return p.num("J");
  if (p.given("J_over_h")) return p.num("J_over_h") * std::abs(h);
  if (p.given("j_frac")) {
    // Position inside [-2h, 2h - 0.1]; 0 maps to the lower edge.
    return -2.0 * h + p.num("j_frac") * (4.0 * h - 0.1);
  }
  return std::abs(h);  // J/|h| = 1
}

struct RowOutput {
  std::vector<double> derived;
  std::vector<double> metrics;
};

RowOutput evaluate_pt(const ExperimentInfo& info, const SweepConfig& cfg, const Tuple& p) {
  BatterySpec spec;
  spec.n_sites = p.integer("n_sites");
  spec.h = p.num("h");
  spec.J = pt_coupling(p, spec.h);
  spec.gamma = p.num("gamma");
  spec.delta = p.given("delta_over_h") ? p.num("delta_over_h") * std::abs(spec.h)
                                       : (p.given("delta") ? p.num("delta") : 0.0);
  spec.boundary = parse_boundary(p.text("boundary"));
  const double alpha = p.num("alpha");

  const PreparedBattery battery = prepare_battery(spec);
  const QuantumState rho0 = prepare_initial_state(battery, parse_init(p));
  const DeltaRecord d =
      delta_p_max(battery.normalized, build_pt_charger(alpha, spec.n_sites),
                  build_pt_hermitian_charger(alpha, spec.n_sites), rho0, cfg.t_max, cfg.n_grid);
  RowOutput out;
  if (!info.derived.empty()) out.derived = {spec.J};
  out.metrics = {d.p_max_nonhermitian, d.p_max_hermitian};
  if (info.metrics.size() == 3) out.metrics.push_back(d.delta);
  return out;
}

RowOutput evaluate_rt(const ExperimentInfo& info, const SweepConfig& cfg, const Tuple& p) {
  ChargerSpec nh;
  nh.kind = ChargerKind::rt;
  nh.n_sites = p.integer("n_sites");
  nh.gamma_prime = p.num("gamma_prime");
  nh.h_prime = p.num("h");
  nh.J = p.num("J");
  nh.boundary = parse_boundary(p.text("boundary"));
  ChargerSpec herm = nh;
  herm.kind = ChargerKind::rt_hermitian;
  if (p.given("h_herm")) herm.h_prime = p.num("h_herm");

  const PreparedBattery battery = prepare_battery(NonInteractingBattery{nh.n_sites});
  const QuantumState rho0 = prepare_initial_state(battery, parse_init(p));
  const DeltaRecord d = delta_p_max(battery.normalized, build_charger(nh), build_charger(herm),
                                    rho0, cfg.t_max, cfg.n_grid);
  RowOutput out;
  out.metrics = {d.p_max_nonhermitian, d.p_max_hermitian};
  if (info.metrics.size() == 3) out.metrics.push_back(d.delta);
  return out;
}

RowOutput evaluate_ergotropy(const Tuple& p) {
  const int n = p.integer("n_sites");
  const double t = p.num("t");
  if (!(t >= 0.0)) throw std::invalid_argument("t must be >= 0");
  const Boundary boundary = parse_boundary(p.text("boundary"));

  BatterySpec xx;
  xx.n_sites = n;
  xx.J = p.num("J");
  xx.h = p.num("h");
  xx.boundary = boundary;
  const PreparedBattery pt_battery = prepare_battery(xx);
  const QuantumState pt0 = ground_state(pt_battery.normalized);
  const QuantumState pt_t = evolve_normalized(build_pt_charger(p.num("alpha"), n), pt0, t);

  ChargerSpec rt;
  rt.kind = ChargerKind::rt;
  rt.n_sites = n;
  rt.gamma_prime = p.num("gamma_prime");
  rt.h_prime = p.num("h_rt");
  rt.boundary = boundary;
  const PreparedBattery rt_battery = prepare_battery(NonInteractingBattery{n});
  const QuantumState rt0 = ground_state(rt_battery.normalized);
  const QuantumState rt_t = evolve_normalized(build_charger(rt), rt0, t);

  RowOutput out;
  out.metrics = {work(pt_battery.normalized, pt0, pt_t), ergotropy(pt_battery.normalized, pt_t),
                 work(rt_battery.normalized, rt0, rt_t), ergotropy(rt_battery.normalized, rt_t)};
  return out;
}

RowOutput evaluate(const ExperimentInfo& info, const SweepConfig& cfg, const Tuple& p) {
  switch (info.family) {
    case Family::pt:
      return evaluate_pt(info, cfg, p);
    case Family::rt:
      return evaluate_rt(info, cfg, p);
    case Family::ergotropy:
      return evaluate_ergotropy(p);
  }
  throw std::logic_error("unknown experiment family");
}

std::vector<std::string> fit_metadata(const SweepResult& r, const ExperimentInfo& info) {
  std::vector<std::string> lines;
  if (info.scaling_parameter.empty()) return lines;
  std::size_t n_col = 0;
  while (n_col < r.columns.size() && r.columns[n_col] != info.scaling_parameter) ++n_col;
  const std::size_t first_metric = r.columns.size() - info.metrics.size();
  for (std::size_t m = first_metric; m < r.columns.size(); ++m) {
    std::vector<double> ns;
    std::vector<double> ps;
    for (const auto& row : r.rows) {
      if (row.degenerate) continue;
      ns.push_back(row.values[n_col]);
      ps.push_back(row.values[m]);
    }
    std::string line = "fit " + r.columns[m] + " = c * " + info.scaling_parameter + "^p: ";
    try {
      const PowerLawFit f = fit_power_law(ns, ps);
      line += "c = " + format_number(f.coefficient) + ", p = " + format_number(f.exponent) +
              ", rms_log_residual = " + format_number(f.residual);
    } catch (const std::invalid_argument& e) {
      line += std::string("unavailable (") + e.what() + ")";
    }
    lines.push_back(line);
  }
  return lines;
}

}  // namespace

const ExperimentInfo& experiment_info(Experiment e) {
  for (const auto& info : registry())
    if (info.id == e) return info;
  throw std::invalid_argument("no registry entry for experiment");
}

void validate_config(const SweepConfig& config) {
  const ExperimentInfo& info = experiment_info(config.experiment);
  const std::string name = to_string(config.experiment);
  if (config.ranges.empty()) throw std::invalid_argument(name + ": at least one range is required");
  auto accepted = [&] {
    std::string s;
    for (const auto& [k, v] : info.parameters) s += (s.empty() ? "" : ", ") + k;
    return s;
  };
  for (const auto& r : config.ranges) {
    if (!info.parameters.count(r.name)) {
      throw std::invalid_argument(name + ": unknown parameter '" + r.name + "' (accepted: " +
                                  accepted() + ")");
    }
    if (kTextParameters.count(r.name)) {
      throw std::invalid_argument(name + ": '" + r.name + "' cannot be ranged");
    }
    if (r.count < 1) throw std::invalid_argument(name + ": range count must be >= 1");
  }
  for (const auto& [k, v] : config.fixed) {
    if (!info.parameters.count(k)) {
      throw std::invalid_argument(name + ": unknown parameter '" + k + "' (accepted: " +
                                  accepted() + ")");
    }
    if (!kTextParameters.count(k)) parse_real(v);
  }
  for (const auto& group : info.required) {
    const bool ok = std::any_of(group.begin(), group.end(),
                                [&](const std::string& p) { return config.has(p); });
    if (!ok) {
      std::string alts;
      for (const auto& p : group) alts += (alts.empty() ? "" : " or ") + p;
      throw std::invalid_argument(name + ": missing required parameter " + alts);
    }
  }
  int coupling = 0;
  for (const auto& p : kCouplingGroup) coupling += config.has(p) ? 1 : 0;
  if (info.family == Family::pt && coupling > 1) {
    throw std::invalid_argument(name + ": give only one of J, J_over_h, j_frac");
  }
  if (config.has("delta") && config.has("delta_over_h")) {
    throw std::invalid_argument(name + ": give only one of delta, delta_over_h");
  }
  if (const Range* n = config.find_range("n_sites")) {
    for (double v : n->values()) {
      if (std::abs(v - std::round(v)) > 1e-9 || v < 1 || v > max_sites()) {
        throw std::invalid_argument(name + ": n_sites values must be integers in [1, " +
                                    std::to_string(max_sites()) + "]");
      }
    }
  }
  if (!(config.t_max > 0.0)) throw std::invalid_argument(name + ": t_max must be > 0");
  if (config.n_grid < 16) throw std::invalid_argument(name + ": n_grid must be >= 16");
}

SweepResult run_experiment(const SweepConfig& config) {
  validate_config(config);
  const auto started = std::chrono::steady_clock::now();
  const ExperimentInfo& info = experiment_info(config.experiment);

  std::vector<std::vector<double>> axes;
  std::size_t n_rows = 1;
  for (const auto& r : config.ranges) {
    axes.push_back(r.values());
    n_rows *= axes.back().size();
  }

  SweepResult result;
  result.experiment = config.experiment;
  for (const auto& r : config.ranges) result.columns.push_back(r.name);
  result.n_parameter_columns = result.columns.size();
  for (const auto& d : info.derived) result.columns.push_back(d);
  for (const auto& m : info.metrics) result.columns.push_back(m);
  result.rows.resize(n_rows);

  auto tuple_at = [&](std::size_t index) {
    std::vector<double> v(axes.size());
    for (std::size_t a = axes.size(); a-- > 0;) {
      v[a] = axes[a][index % axes[a].size()];
      index /= axes[a].size();
    }
    return v;
  };

  int workers = config.workers > 0 ? config.workers
                                   : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, static_cast<int>(std::max<std::size_t>(n_rows, 1)));

  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  std::mutex error_mutex;
  std::size_t error_index = n_rows;
  std::string error_message;

  auto work_loop = [&] {
    while (!abort.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n_rows) return;
      const std::vector<double> ranged = tuple_at(i);
      const Tuple tuple(config, info, ranged);
      SweepRow row;
      row.values = ranged;
      try {
        const RowOutput out = evaluate(info, config, tuple);
        row.values.insert(row.values.end(), out.derived.begin(), out.derived.end());
        row.values.insert(row.values.end(), out.metrics.begin(), out.metrics.end());
        for (double v : row.values) {
          if (!std::isfinite(v)) throw ConsistencyError("non-finite result");
        }
      } catch (const DegenerateGroundStateError&) {
        row.degenerate = true;
        row.values.resize(ranged.size());
        if (!info.derived.empty()) {
          // Derived columns do not depend on the state; recompute them.
          const double h = tuple.num("h");
          row.values.push_back(pt_coupling(tuple, h));
        }
        row.values.resize(result.columns.size(), std::numeric_limits<double>::quiet_NaN());
      } catch (const std::exception& e) {
        std::lock_guard lock(error_mutex);
        if (i < error_index) {
          error_index = i;
          error_message = tuple.describe() + ": " + e.what();
        }
        abort.store(true);
        return;
      }
      result.rows[i] = std::move(row);
    }
  };

  if (workers == 1) {
    work_loop();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(work_loop);
    for (auto& t : pool) t.join();
  }
  if (error_index < n_rows) {
    throw std::runtime_error(to_string(config.experiment) + " failed at " + error_message);
  }

  result.metadata.push_back(std::string("qbattery ") + QBATTERY_VERSION);
  for (const auto& line : echo_config(config)) result.metadata.push_back(line);
  for (const auto& line : fit_metadata(result, info)) result.metadata.push_back(line);
  result.workers = workers;
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

PowerLawFit fit_power_law(const std::vector<double>& n_values,
                          const std::vector<double>& p_max_values) {
  if (n_values.size() != p_max_values.size()) {
    throw std::invalid_argument("fit_power_law: size mismatch");
  }
  const std::size_t m = n_values.size();
  if (m < 3) throw std::invalid_argument("fit_power_law: need at least 3 points");
  std::vector<double> xs(m), ys(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (!(n_values[i] > 0.0) || !(p_max_values[i] > 0.0)) {
      throw std::invalid_argument("fit_power_law: values must be positive");
    }
    xs[i] = std::log(n_values[i]);
    ys[i] = std::log(p_max_values[i]);
  }
  const double md = static_cast<double>(m);
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    mx += xs[i] / md;
    my += ys[i] / md;
  }
  double var = 0.0, cov = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    var += (xs[i] - mx) * (xs[i] - mx);
    cov += (xs[i] - mx) * (ys[i] - my);
  }
  const bool all_equal = std::all_of(n_values.begin(), n_values.end(),
                                     [&](double n) { return n == n_values.front(); });
  if (all_equal || !(var > 0.0)) {
    throw std::invalid_argument("fit_power_law: N values must not all be equal");
  }
  PowerLawFit fit;
  fit.exponent = cov / var;
  const double log_c = my - fit.exponent * mx;
  fit.coefficient = std::exp(log_c);
  double ss = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = std::log(p_max_values[i]) - (log_c + fit.exponent * std::log(n_values[i]));
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / md);
  return fit;
}

}  // namespace qbattery
