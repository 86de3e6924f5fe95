#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tempis/diagnostics.hpp"
#include "tempis/harness/config.hpp"
#include "tempis/harness/csv.hpp"

namespace tempis::harness {

/// Pi(f) used to center replicate estimates, with where the number came from
/// ("closed_form", "cdf" or "quadrature").
struct Truth {
  std::string function;
  double value;
  std::string provenance;
};
Truth ground_truth(const Target& target, const TestFunction& f);

struct ExperimentResult {
  std::vector<CsvRow> rows;
  std::vector<Truth> truths;
  /// Time grid actually used by KS curves, and whether it came from the config.
  std::vector<double> time_grid;
  std::string time_grid_label;
  std::size_t replicates = 0;
  std::size_t degenerate = 0;
};

/// Default KS time grid (normalized time): 0 followed by a geometric grid.
std::vector<double> default_time_grid();

ExperimentResult run_table1_is(const ExperimentConfig& config);
/// Replicated tempered chains for every (beta, init, f): n Var ratio to sigma^2(Pi, f).
/// Backs Table1_MCMC, Fig2_Variance and Custom.
ExperimentResult run_chain_variance(const ExperimentConfig& config);
ExperimentResult run_fig1(const ExperimentConfig& config);
ExperimentResult run_risk(const ExperimentConfig& config);
ExperimentResult run_drift(const ExperimentConfig& config);
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Built-in drift inequality checks on the truncated kernel.
struct DriftScenario {
  std::string id;
  RwmhKernel kernel;
  DriftCheckSpec spec;
  std::vector<double> grid;
};
std::vector<DriftScenario> drift_scenarios();

/// Exponential hitting-time moment check: super-exponential target, x0 = 2D.
struct HittingScenario {
  RwmhKernel kernel;
  double x0;
  double d;
  double alpha;
};
HittingScenario hitting_scenario();

/// Plain-text rendering of the table1 experiment from IS and MCMC rows.
std::string format_table1(const std::vector<CsvRow>& is_rows, const std::vector<CsvRow>& mcmc_rows);

struct RunSummary {
  ExperimentResult result;
  std::string csv_path;
  std::string meta_path;
  double wall_seconds = 0.0;
  /// 0, or 3 when the degenerate fraction exceeds config.degenerate_threshold.
  int exit_code = 0;
};

/// Writes the CSV and its ".meta.json" sidecar.
void write_outputs(const ExperimentConfig& config, const ExperimentResult& result, double wall_seconds,
                   const std::string& csv_path);
RunSummary run(const ExperimentConfig& config);

}  // namespace tempis::harness
