#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace qbattery {

/// One comparison between a closed form and the numerical pipeline.
struct OracleComparison {
  std::string name;
  double max_abs_error = 0.0;
  double tolerance = 0.0;  // 0 for informational rows (alternative-form discrepancies)
  bool passed = true;
};

/// Uniform grid of `count` times over [t_lo, t_hi] used by the two-site checks.
std::vector<double> oracle_time_grid(double t_lo = 0.01, double t_hi = 10.0, int count = 2000);

/// Numerical W(t)/t for the two-site PT set-up (XX battery J, h; initial |11>).
std::vector<double> numeric_pt_power(double J, double h, double alpha, bool hermitian,
                                     const std::vector<double>& times);
/// Numerical W(t)/t for the two-site RT set-up (non-interacting battery).
std::vector<double> numeric_rt_power(double gamma_prime, double h, bool hermitian,
                                     const std::vector<double>& times);

/// Runs every closed-form equivalence check plus informational comparisons of
/// the alternative forms that disagree with direct evolution.
std::vector<OracleComparison> run_oracle_checks();

/// Prints one line per comparison; returns true when all gated rows pass.
bool print_oracle_report(const std::vector<OracleComparison>& rows, std::ostream& out);

}  // namespace qbattery
