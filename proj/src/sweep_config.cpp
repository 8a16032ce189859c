#include "qbattery/sweep_config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace qbattery {

namespace {

const std::vector<std::pair<Experiment, std::string>>& experiment_names() {
  static const std::vector<std::pair<Experiment, std::string>> names = {
      {Experiment::fig_ergotropy, "fig_ergotropy"},
      {Experiment::fig_pt_map, "fig_pt_map"},
      {Experiment::fig_pmax_vs_alpha, "fig_pmax_vs_alpha"},
      {Experiment::fig_pmax_vs_J, "fig_pmax_vs_J"},
      {Experiment::fig_scaling_N, "fig_scaling_N"},
      {Experiment::fig_pmax_vs_gamma, "fig_pmax_vs_gamma"},
      {Experiment::fig_pmax_vs_delta, "fig_pmax_vs_delta"},
      {Experiment::fig_thermal_pt, "fig_thermal_pt"},
      {Experiment::fig_rt_map, "fig_rt_map"},
      {Experiment::fig_rt_vs_gammaprime, "fig_rt_vs_gammaprime"},
      {Experiment::fig_rt_scaling_N, "fig_rt_scaling_N"},
      {Experiment::fig_thermal_rt, "fig_thermal_rt"},
  };
  return names;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_factor(const std::string& raw) {
  const std::string f = trim(raw);
  if (f.empty()) throw std::invalid_argument("empty factor");
  if (f == "pi") return M_PI;
  if (f == "inf" || f == "+inf") return std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  const double v = std::stod(f, &used);
  if (used != f.size()) throw std::invalid_argument("bad number '" + f + "'");
  return v;
}

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string to_string(Experiment e) {
  for (const auto& [id, name] : experiment_names())
    if (id == e) return name;
  throw std::invalid_argument("unknown experiment id");
}

Experiment parse_experiment(const std::string& name) {
  for (const auto& [id, n] : experiment_names())
    if (n == name) return id;
  throw std::invalid_argument("unknown experiment '" + name + "'");
}

const std::vector<Experiment>& all_experiments() {
  static const std::vector<Experiment> all = [] {
    std::vector<Experiment> v;
    for (const auto& [id, name] : experiment_names()) v.push_back(id);
    return v;
  }();
  return all;
}

std::vector<double> Range::values() const {
  if (count < 1) throw std::invalid_argument("range '" + name + "': count must be >= 1");
  std::vector<double> v(count);
  if (count == 1) {
    v[0] = start;
    return v;
  }
  for (int i = 0; i < count; ++i) {
    v[i] = start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  v.back() = stop;
  return v;
}

const Range* SweepConfig::find_range(const std::string& name) const {
  for (const auto& r : ranges)
    if (r.name == name) return &r;
  return nullptr;
}

bool SweepConfig::has(const std::string& name) const {
  return find_range(name) != nullptr || fixed.count(name) != 0;
}

double parse_real(const std::string& text) {
  std::string s = trim(text);
  if (s.empty()) throw std::invalid_argument("empty numeric value");
  double sign = 1.0;
  if (s[0] == '-' && s.find_first_of("*/", 1) != std::string::npos) {
    sign = -1.0;
    s = s.substr(1);
  } else if (s[0] == '-' && trim(s.substr(1)) == "pi") {
    return -M_PI;
  }
  // Left-to-right product/quotient of factors.
  double value = 1.0;
  char op = '*';
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = s.find_first_of("*/", pos);
    const double f = parse_factor(s.substr(pos, next == std::string::npos ? next : next - pos));
    value = op == '*' ? value * f : value / f;
    if (next == std::string::npos) break;
    op = s[next];
    pos = next + 1;
  }
  return sign * value;
}

SweepConfig parse_config(std::istream& in) {
  SweepConfig cfg;
  bool have_experiment = false;
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& msg) {
    throw std::invalid_argument("config line " + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) fail("empty key or value");
    try {
      if (key == "experiment") {
        cfg.experiment = parse_experiment(value);
        have_experiment = true;
      } else if (key == "t_max") {
        cfg.t_max = parse_real(value);
      } else if (key == "n_grid") {
        cfg.n_grid = std::stoi(value);
      } else if (key == "output") {
        cfg.output_path = value;
      } else if (key == "workers") {
        cfg.workers = std::stoi(value);
      } else if (key == "plot") {
        cfg.plot = value == "true" || value == "1" || value == "yes";
      } else if (key.rfind("range.", 0) == 0) {
        Range r;
        r.name = key.substr(6);
        if (r.name.empty()) fail("range needs a parameter name");
        std::vector<std::string> parts;
        std::stringstream ss(value);
        for (std::string p; std::getline(ss, p, ',');) parts.push_back(trim(p));
        if (parts.size() != 3) fail("range expects 'start, stop, count'");
        r.start = parse_real(parts[0]);
        r.stop = parse_real(parts[1]);
        r.count = std::stoi(parts[2]);
        if (r.count < 1) fail("range count must be >= 1");
        if (cfg.find_range(r.name)) fail("duplicate range '" + r.name + "'");
        cfg.ranges.push_back(r);
      } else {
        cfg.fixed[key] = value;
      }
    } catch (const std::invalid_argument& e) {
      if (std::string(e.what()).rfind("config line", 0) == 0) throw;
      fail(e.what());
    } catch (const std::out_of_range& e) {
      fail(std::string("value out of range: ") + e.what());
    }
  }
  if (!have_experiment) throw std::invalid_argument("config: missing 'experiment'");
  if (!(cfg.t_max > 0.0)) throw std::invalid_argument("config: t_max must be > 0");
  if (cfg.n_grid < 16) throw std::invalid_argument("config: n_grid must be >= 16");
  for (const auto& r : cfg.ranges) {
    if (cfg.fixed.count(r.name)) {
      throw std::invalid_argument("config: '" + r.name + "' is both ranged and fixed");
    }
  }
  return cfg;
}

SweepConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  return parse_config(in);
}

std::vector<std::string> echo_config(const SweepConfig& config) {
  std::vector<std::string> out;
  out.push_back("experiment = " + to_string(config.experiment));
  for (const auto& r : config.ranges) {
    out.push_back("range." + r.name + " = " + format_real(r.start) + ", " + format_real(r.stop) +
                  ", " + std::to_string(r.count));
  }
  for (const auto& [k, v] : config.fixed) out.push_back(k + " = " + v);
  out.push_back("t_max = " + format_real(config.t_max));
  out.push_back("n_grid = " + std::to_string(config.n_grid));
  return out;
}

}  // namespace qbattery
