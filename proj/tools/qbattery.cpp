// qbattery: run parameter sweeps, check the closed forms, list experiments.

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "qbattery/experiment.hpp"
#include "qbattery/oracle_check.hpp"
#include "qbattery/tensor_core.hpp"

namespace {

int run(const std::string& config_path, std::optional<int> workers, std::optional<double> t_max,
        std::optional<int> n_grid, std::optional<std::string> out, bool plot) {
  qbattery::SweepConfig cfg = qbattery::load_config(config_path);
  if (workers) cfg.workers = *workers;
  if (t_max) cfg.t_max = *t_max;
  if (n_grid) cfg.n_grid = *n_grid;
  if (out) cfg.output_path = *out;
  if (plot) cfg.plot = true;
  if (cfg.output_path.empty()) cfg.output_path = qbattery::to_string(cfg.experiment) + ".csv";

  const qbattery::SweepResult result = qbattery::run_experiment(cfg);
  const std::string script = qbattery::emit_outputs(result, cfg.output_path, cfg.plot);
  std::size_t degenerate = 0;
  for (const auto& row : result.rows) degenerate += row.degenerate ? 1 : 0;
  std::fprintf(stderr, "%s: %zu rows (%zu degenerate) in %.2f s with %d worker(s) -> %s\n",
               qbattery::to_string(cfg.experiment).c_str(), result.rows.size(), degenerate,
               result.wall_seconds, result.workers, cfg.output_path.c_str());
  if (!script.empty()) std::fprintf(stderr, "plot script: %s\n", script.c_str());
  for (const auto& line : result.metadata) {
    if (line.rfind("fit ", 0) == 0) std::fprintf(stderr, "%s\n", line.c_str());
  }
  return 0;
}

int list_experiments() {
  for (qbattery::Experiment e : qbattery::all_experiments()) {
    const auto& info = qbattery::experiment_info(e);
    std::cout << qbattery::to_string(e) << "\n    " << info.description << "\n    required:";
    for (const auto& group : info.required) {
      std::cout << ' ';
      for (std::size_t i = 0; i < group.size(); ++i) std::cout << (i ? "|" : "") << group[i];
    }
    std::cout << "\n    parameters:";
    for (const auto& [name, def] : info.parameters) {
      std::cout << ' ' << name;
      if (!def.empty()) std::cout << '=' << def;
    }
    std::cout << "\n    columns: <ranges>";
    for (const auto& d : info.derived) std::cout << ", " << d;
    for (const auto& m : info.metrics) std::cout << ", " << m;
    std::cout << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Non-Hermitian quantum battery simulator"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "Run the sweep described by a key = value config file");
  std::string config_path;
  std::optional<int> workers;
  std::optional<double> t_max;
  std::optional<int> n_grid;
  std::optional<std::string> out;
  bool plot = false;
  run_cmd->add_option("config", config_path, "Config file")->required();
  run_cmd->add_option("--workers", workers, "Worker threads (default: available parallelism)")
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--t-max", t_max, "Charging window (0, t_max]")->check(CLI::PositiveNumber);
  run_cmd->add_option("--n-grid", n_grid, "Time-grid points")->check(CLI::Range(16, 100000000));
  run_cmd->add_option("--out", out, "Output CSV path");
  run_cmd->add_flag("--plot", plot, "Also write a gnuplot script next to the CSV");

  auto* oracle_cmd =
      app.add_subcommand("oracle-check", "Compare the two-site closed forms with the numerics");
  auto* list_cmd = app.add_subcommand("list-experiments", "List experiments and their parameters");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return run(config_path, workers, t_max, n_grid, out, plot);
    if (*oracle_cmd) {
      const bool ok = qbattery::print_oracle_report(qbattery::run_oracle_checks(), std::cout);
      std::cout << (ok ? "oracle-check: all gated comparisons passed\n"
                       : "oracle-check: FAILED\n");
      return ok ? 0 : 1;
    }
    if (*list_cmd) return list_experiments();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "qbattery: error: %s\n", e.what());
    return 1;
  }
  return 0;
}
