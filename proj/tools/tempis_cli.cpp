// tempis: reproduce the importance-tempering experiments from the command line.

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "tempis/harness/experiments.hpp"

namespace h = tempis::harness;

namespace {

struct CommonFlags {
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<std::string> out;
  bool smoke = false;
};

h::ExperimentConfig apply(h::ExperimentConfig c, const CommonFlags& flags) {
  if (flags.seed) c.master_seed = *flags.seed;
  if (flags.workers) c.workers = *flags.workers;
  if (flags.out) c.output_path = (std::filesystem::path(*flags.out) / std::filesystem::path(c.output_path).filename()).string();
  if (flags.smoke) c.n_rep = h::smoke_replicates(c.n_rep);
  return c;
}

int execute(const h::ExperimentConfig& config, std::vector<tempis::harness::CsvRow>* rows = nullptr) {
  auto summary = h::run(config);
  fmt::print("{}: {} rows -> {} ({:.2f} s)\n", h::to_string(config.experiment), summary.result.rows.size(),
             summary.csv_path, summary.wall_seconds);
  if (summary.exit_code == 3)
    fmt::print(stderr, "degenerate replicates {} of {} exceed threshold {}\n", summary.result.degenerate,
               summary.result.replicates, config.degenerate_threshold);
  if (rows) *rows = summary.result.rows;
  return summary.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Importance-tempered Metropolis-Hastings and minimax importance sampling experiments"};
  app.require_subcommand(1);
  app.fallthrough();

  CommonFlags flags;
  app.add_option("--seed", flags.seed, "Master seed");
  app.add_option("--workers", flags.workers, "Worker threads")->check(CLI::Range(1u, 4096u));
  app.add_option("--out", flags.out, "Output directory");
  app.add_flag("--smoke", flags.smoke, "Run at 1/20 of the replicates");

  auto* table1 = app.add_subcommand("table1", "Asymptotic variance table for the Gaussian target");
  auto* fig1 = app.add_subcommand("fig1", "KS curves of the jump process for the t4 target");
  auto* fig2 = app.add_subcommand("fig2", "Variance ratio against beta (Gaussian and t4 panels)");
  auto* risk = app.add_subcommand("risk", "Worst-case risk for a finite target");
  auto* drift = app.add_subcommand("drift", "Drift inequalities and hitting-time moment");
  auto* run = app.add_subcommand("run", "Run an experiment described by a config file");
  std::string config_path;
  run->add_option("config", config_path, "Config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*table1) {
      std::vector<h::CsvRow> is_rows, mcmc_rows;
      int a = execute(apply(h::preset(h::ExperimentKind::Table1_IS), flags), &is_rows);
      int b = execute(apply(h::preset(h::ExperimentKind::Table1_MCMC), flags), &mcmc_rows);
      std::cout << '\n' << h::format_table1(is_rows, mcmc_rows);
      return std::max(a, b);
    }
    if (*fig1) return execute(apply(h::preset(h::ExperimentKind::Fig1_KS), flags));
    if (*fig2) {
      int a = execute(apply(h::preset(h::ExperimentKind::Fig2_Variance), flags));
      int b = execute(apply(h::fig2_t4_preset(), flags));
      return std::max(a, b);
    }
    if (*risk) return execute(apply(h::preset(h::ExperimentKind::RiskFinite), flags));
    if (*drift) return execute(apply(h::preset(h::ExperimentKind::DriftVerify), flags));
    if (*run) {
      auto config = apply(h::load_config(config_path), flags);
      h::validate(config);
      return execute(config);
    }
  } catch (const h::ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
