#pragma once

#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace qbattery {

enum class Experiment {
  fig_ergotropy,
  fig_pt_map,
  fig_pmax_vs_alpha,
  fig_pmax_vs_J,
  fig_scaling_N,
  fig_pmax_vs_gamma,
  fig_pmax_vs_delta,
  fig_thermal_pt,
  fig_rt_map,
  fig_rt_vs_gammaprime,
  fig_rt_scaling_N,
  fig_thermal_rt
};

std::string to_string(Experiment e);
Experiment parse_experiment(const std::string& name);
const std::vector<Experiment>& all_experiments();

/// Inclusive linear grid: count points from start to stop.
struct Range {
  std::string name;
  double start = 0.0;
  double stop = 0.0;
  int count = 1;

  std::vector<double> values() const;
};

struct SweepConfig {
  Experiment experiment = Experiment::fig_pt_map;
  std::vector<Range> ranges;                  // declared order = row order
  std::map<std::string, std::string> fixed;   // parameter -> textual value
  double t_max = 10.0;
  int n_grid = 2000;
  std::string output_path;
  int workers = 0;  // 0: available parallelism
  bool plot = false;

  const Range* find_range(const std::string& name) const;
  bool has(const std::string& name) const;
};

/// Real literal with optional pi factors: "0.5", "pi/3", "-2*pi/3", "inf".
double parse_real(const std::string& text);

/// key = value lines, '#' comments. Recognized keys: experiment, t_max, n_grid,
/// output, workers, plot, range.<name> = start, stop, count. Any other key is
/// a fixed parameter. Throws std::invalid_argument with the line number on errors.
SweepConfig parse_config(std::istream& in);
SweepConfig load_config(const std::string& path);

/// Canonical key = value rendering (used for the CSV metadata echo). Excludes
/// `workers`, which must not affect output bytes.
std::vector<std::string> echo_config(const SweepConfig& config);

}  // namespace qbattery
