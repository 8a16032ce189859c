#pragma once

#include <map>
#include <string>
#include <vector>

#include "qbattery/sweep_config.hpp"

namespace qbattery {

enum class Family { pt, rt, ergotropy };

struct ExperimentInfo {
  Experiment id;
  Family family;
  std::string description;
  /// Each group must have at least one member present in ranges or fixed.
  std::vector<std::vector<std::string>> required;
  /// Every accepted parameter with its default ("" = no default).
  std::map<std::string, std::string> parameters;
  /// Columns computed from the tuple and written between parameters and metrics.
  std::vector<std::string> derived;
  std::vector<std::string> metrics;
  /// Parameter against which a power law is fitted, if any.
  std::string scaling_parameter;
};

const ExperimentInfo& experiment_info(Experiment e);

struct SweepRow {
  std::vector<double> values;  // parameters, derived, metrics (NaN when degenerate)
  bool degenerate = false;
};

struct SweepResult {
  Experiment experiment = Experiment::fig_pt_map;
  std::vector<std::string> columns;
  std::size_t n_parameter_columns = 0;
  std::vector<SweepRow> rows;
  std::vector<std::string> metadata;  // without the leading "# "
  double wall_seconds = 0.0;
  int workers = 1;
};

/// Validates the config against the registry; throws std::invalid_argument.
void validate_config(const SweepConfig& config);

/// Rows in lexicographic order over the declared ranges (last range fastest),
/// independent of the worker count.
SweepResult run_experiment(const SweepConfig& config);

struct PowerLawFit {
  double coefficient = 0.0;
  double exponent = 0.0;
  double residual = 0.0;  // RMS in log space
};

PowerLawFit fit_power_law(const std::vector<double>& n_values,
                          const std::vector<double>& p_max_values);

/// "%.17g"
std::string format_number(double v);

/// CSV text: "# " metadata lines, a "# run: ..." line (workers, wall time),
/// header, rows. Degenerate rows carry DEGEN in the metric columns.
std::string render_csv(const SweepResult& result);

/// Writes the CSV and, if requested, a gnuplot script next to it (same stem,
/// ".gp") that references the CSV by file name. Returns the script path or "".
std::string emit_outputs(const SweepResult& result, const std::string& path, bool plot);

SweepResult parse_csv(const std::string& text);
SweepResult read_csv(const std::string& path);

/// The CSV text minus the "# run:" line; identical for identical configs.
std::string csv_body(const std::string& csv_text);

}  // namespace qbattery
