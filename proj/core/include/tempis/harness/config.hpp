#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tempis::harness {

enum class ExperimentKind { Table1_IS, Table1_MCMC, Fig1_KS, Fig2_Variance, RiskFinite, DriftVerify, Custom };

std::string to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(const std::string& text);

/// Raised for malformed or invalid configuration; carries the offending line (0 if none) and key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::size_t line, std::string field, const std::string& message);
  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::Custom;
  std::string target = "gaussian(0,1)";
  /// Inverse temperatures; for RiskFinite these are tempered trials.
  std::vector<double> betas;
  /// Explicit finite trial, "finite(q1,...,qN)" (RiskFinite only).
  std::optional<std::string> trial;
  std::vector<std::string> functions;
  std::size_t n = 1000;
  std::size_t n_rep = 2000;
  std::vector<double> inits;
  std::uint64_t master_seed = 1;
  std::string output_path = "out.csv";
  unsigned workers = 1;
  double proposal_sd = 2.0;
  bool truncated = false;
  /// Normalized times for KS curves; empty selects the default geometric grid.
  std::vector<double> time_grid;
  /// Largest tolerated fraction of degenerate replicates before the run fails.
  double degenerate_threshold = 0.01;
  /// Custom only: where to write the jump path and chain of replicate 0.
  std::optional<std::string> path_output;
  /// Jumps allowed per hitting-time trajectory before it is censored.
  std::size_t jump_budget = 10'000'000;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Flat "key = value" text, '#' starts a comment. Lists are comma separated
/// (commas inside parentheses do not split). Unknown keys are errors.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);

/// Checks cross-field constraints (beta range against the target, list contents, ...).
void validate(const ExperimentConfig& config);

/// Re-emits the config in the same text format; parse_config(format_config(c)) == c.
std::string format_config(const ExperimentConfig& config);

/// Full-scale preset for a built-in experiment; `smoke` divides replicates by 20.
ExperimentConfig preset(ExperimentKind kind, bool smoke = false);
/// Second panel of the variance-vs-beta figure (t4 target).
ExperimentConfig fig2_t4_preset(bool smoke = false);

std::size_t smoke_replicates(std::size_t n_rep);

}  // namespace tempis::harness
