#include "tempis/harness/experiments.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>
#include <json.hpp>

#include "../parse_util.hpp"
#include "tempis/parallel.hpp"
#include "tempis/version.hpp"

namespace tempis::harness {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double double_factorial(int k) {
  double r = 1.0;
  for (int i = k; i > 1; i -= 2) r *= i;
  return r;
}

std::optional<double> closed_form_moment(const Target& target, int k) {
  if (const auto* g = std::get_if<Gaussian>(&target.kind())) {
    if (k == 1) return g->mean;
    if (g->mean != 0.0) return std::nullopt;
    if (k % 2 == 1) return 0.0;
    return std::pow(g->sd, k) * double_factorial(k - 1);
  }
  if (const auto* t = std::get_if<StudentT>(&target.kind())) {
    const double nu = t->dof;
    if (!(k < nu)) return std::nullopt;
    if (k % 2 == 1) return 0.0;
    if (k == 2) return nu / (nu - 2.0);
    if (k == 4) return 3.0 * nu * nu / ((nu - 2.0) * (nu - 4.0));
  }
  return std::nullopt;
}

std::string fmt_real(double x) { return format_real(x); }

}  // namespace

Truth ground_truth(const Target& target, const TestFunction& f) {
  auto call = detail::parse_call(f.name());
  if (call.name == "indicator" && call.args.size() == 2)
    return {f.name(), target.interval_mass(call.args[0], call.args[1]), "cdf"};
  std::optional<double> moment;
  if (call.name == "power" && call.args.size() == 1) moment = closed_form_moment(target, static_cast<int>(call.args[0]));
  if (call.name == "identity") moment = closed_form_moment(target, 1);
  if (call.name == "constant" && call.args.size() == 1) moment = call.args[0];
  if (moment) return {f.name(), *moment, "closed_form"};
  return {f.name(), target.expectation(f), "quadrature"};
}

std::vector<double> default_time_grid() {
  std::vector<double> grid{0.0};
  constexpr int kPoints = 60;
  const double lo = 0.01, hi = 100.0;
  for (int i = 0; i < kPoints; ++i) grid.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (kPoints - 1)));
  return grid;
}

// ---------------------------------------------------------------- table1, IS columns

ExperimentResult run_table1_is(const ExperimentConfig& config) {
  ExperimentResult out;
  Target target = Target::parse(config.target);
  for (const auto& name : config.functions) {
    auto f = TestFunction::parse(name);
    double base = target_variance(target, f);
    out.truths.push_back(ground_truth(target, f));
    for (double beta : config.betas) {
      double ratio = asymptotic_variance(Trial(target, Tempered{beta}), target, f) / base;
      out.rows.push_back({"table1_is", beta, std::nullopt, std::nullopt, "ratio:" + f.name(), ratio, std::nullopt});
    }
  }
  return out;
}

// ---------------------------------------------------------------- replicated chains

ExperimentResult run_chain_variance(const ExperimentConfig& config) {
  ExperimentResult out;
  Target target = Target::parse(config.target);
  std::vector<TestFunction> functions;
  std::vector<double> truths, base_variance;
  for (const auto& name : config.functions) {
    functions.push_back(TestFunction::parse(name));
    auto truth = ground_truth(target, functions.back());
    truths.push_back(truth.value);
    base_variance.push_back(target_variance(target, functions.back()));
    out.truths.push_back(truth);
  }

  auto experiment_id = [&](double beta) -> std::string {
    switch (config.experiment) {
      case ExperimentKind::Table1_MCMC: return beta == 1.0 ? "table1_rwmh" : "table1_itmh";
      case ExperimentKind::Fig2_Variance: return "fig2:" + target.describe();
      default: return "custom";
    }
  };

  const std::size_t n_rep = config.n_rep;
  std::size_t cell = 0;
  for (double beta : config.betas) {
    RwmhKernel kernel(target, beta, config.proposal_sd, config.truncated);
    for (double x0 : config.inits) {
      // estimates[fi * n_rep + r]
      std::vector<EstimateRecord> estimates(functions.size() * n_rep);
      const std::size_t offset = cell * n_rep;
      parallel_for(n_rep, config.workers, [&](std::size_t r) {
        Rng moves = Rng::stream(config.master_seed, offset + r, 0);
        auto chain = simulate_jump_chain(kernel, x0, config.n, moves);
        for (std::size_t fi = 0; fi < functions.size(); ++fi) {
          auto e = snis_beta(chain, target, beta, functions[fi]);
          e.seed = moves.seed();
          e.init_state = x0;
          estimates[fi * n_rep + r] = e;
        }
      });
      std::size_t degenerate_cell = 0;
      for (std::size_t fi = 0; fi < functions.size(); ++fi) {
        std::span<const EstimateRecord> slice(estimates.data() + fi * n_rep, n_rep);
        auto rv = replicate_variance(slice, config.n, truths[fi]);
        degenerate_cell = std::max(degenerate_cell, rv.degenerate);
        out.rows.push_back({experiment_id(beta), beta, x0, static_cast<double>(config.n), "ratio:" + functions[fi].name(),
                            rv.value / base_variance[fi], rv.stderr_ / base_variance[fi]});
      }
      out.rows.push_back({experiment_id(beta), beta, x0, static_cast<double>(config.n), "degenerate_replicates",
                          static_cast<double>(degenerate_cell), std::nullopt});
      out.replicates += n_rep;
      out.degenerate += degenerate_cell;
      ++cell;
    }
  }

  if (config.experiment == ExperimentKind::Custom && config.path_output) {
    RwmhKernel kernel(target, config.betas.front(), config.proposal_sd, config.truncated);
    ReplicateStreams streams(config.master_seed, 0);
    auto path = simulate_ctmc(kernel, config.inits.front(), Horizon::jumps(config.n), streams);
    std::ofstream path_out(*config.path_output + "_path.csv");
    write_path_csv(path_out, path);
    std::ofstream chain_out(*config.path_output + "_chain.csv");
    write_chain_csv(chain_out, path.states, target, config.betas.front());
    if (!path_out || !chain_out) throw std::runtime_error("cannot write path output under " + *config.path_output);
  }
  return out;
}

// ---------------------------------------------------------------- KS curves

ExperimentResult run_fig1(const ExperimentConfig& config) {
  ExperimentResult out;
  Target target = Target::parse(config.target);
  out.time_grid = config.time_grid.empty() ? default_time_grid() : config.time_grid;
  out.time_grid_label = config.time_grid.empty() ? "default geometric grid" : "config";
  const double threshold = 2.0 / std::sqrt(static_cast<double>(config.n_rep));
  for (std::size_t bi = 0; bi < config.betas.size(); ++bi) {
    const double beta = config.betas[bi];
    RwmhKernel kernel(target, beta, config.proposal_sd, config.truncated);
    KsCurveOptions options{config.n_rep, splitmix64(config.master_seed + 0x100 * (bi + 1)), config.workers};
    auto curve = ks_curve(kernel, config.inits, out.time_grid, options);
    for (const auto& p : curve) out.rows.push_back({"fig1_ks", beta, p.init, p.t, "ks", p.ks, std::nullopt});
    auto merge = merge_analysis(curve, config.inits, config.inits.front(), threshold);
    out.rows.push_back({"fig1_merge", beta, std::nullopt, std::nullopt, "joint_merge_time",
                        merge.joint_merge_time.value_or(kInf), std::nullopt});
    for (std::size_t i = 0; i < config.inits.size(); ++i)
      out.rows.push_back({"fig1_merge", beta, config.inits[i], std::nullopt, "merge_time",
                          merge.merge_time_vs_reference[i].value_or(kInf), std::nullopt});
    out.replicates += config.n_rep * config.inits.size();
  }
  return out;
}

// ---------------------------------------------------------------- finite-target risk

ExperimentResult run_risk(const ExperimentConfig& config) {
  ExperimentResult out;
  Target target = Target::parse(config.target);
  const auto& pi = std::get<FiniteDiscrete>(target.kind()).probabilities;
  auto emit = [&](const std::string& id, std::optional<double> beta, const RiskReport& report) {
    out.rows.push_back({id, beta, std::nullopt, std::nullopt, "risk", report.risk, std::nullopt});
    out.rows.push_back({id, beta, std::nullopt, std::nullopt, "case:" + to_string(report.case_tag), 1.0, std::nullopt});
    if (report.lambda) out.rows.push_back({id, beta, std::nullopt, std::nullopt, "lambda", *report.lambda, std::nullopt});
  };
  for (double beta : config.betas) {
    std::vector<double> q(pi.size());
    double total = 0.0;
    for (std::size_t i = 0; i < pi.size(); ++i) total += q[i] = std::pow(pi[i], beta);
    for (auto& v : q) v /= total;
    emit("risk_tempered", beta, worst_case_risk_finite(pi, q));
  }
  if (config.trial) {
    auto q = std::get<FiniteDiscrete>(Target::parse(*config.trial).kind()).probabilities;
    emit("risk_explicit", std::nullopt, worst_case_risk_finite(pi, q));
  }
  std::size_t top = 0;
  for (std::size_t i = 1; i < pi.size(); ++i)
    if (pi[i] > pi[top]) top = i;
  if (pi[top] > 0.5) {
    auto minimax = minimax_trial_atom(target, top);
    out.rows.push_back({"risk_minimax", std::nullopt, std::nullopt, std::nullopt, "risk", minimax.risk, std::nullopt});
  }
  return out;
}

// ---------------------------------------------------------------- drift

std::vector<DriftScenario> drift_scenarios() {
  auto grid = [](double d) {
    std::vector<double> g;
    for (int i = 0; i < 20; ++i) g.push_back(d + 4.0 * d * i / 19.0);
    return g;
  };
  std::vector<DriftScenario> out;
  {
    const double a = 1.0, omega = 2.0, beta = 0.5, xi = 1.0;
    const double d = super_exp_min_threshold(a, omega, beta, xi);
    const double alpha = super_exp_drift_rate(a, omega, beta, xi, d);
    RwmhKernel kernel(Target::super_exp(a, omega), beta, xi, true);
    out.push_back({"super_exp", kernel,
                   {DriftFunction::bounded_exponential(xi), d, [alpha](double) { return alpha; },
                    DriftDirection::UpperBound, "bounded exponential V, constant rate"},
                   grid(d)});
  }
  {
    const double gamma = 5.0, beta = 0.55, xi = 1.0, d = 2.0;
    const double nu = gamma * (1.0 - beta) - 2.0;
    RwmhKernel kernel(Target::poly_tail(gamma), beta, xi, true);
    auto v = DriftFunction::bounded_polynomial(xi, nu);
    out.push_back({"poly_tail", kernel,
                   {v, d, [kernel, v](double x) { return concave_drift_rate(kernel, v, x); },
                    DriftDirection::UpperBound, "bounded polynomial V, state-dependent rate"},
                   grid(d)});
  }
  {
    const double gamma = 5.0, beta = 0.65, xi = 1.0, d = 2.0;
    const double alpha = log_drift_rate(gamma, beta, xi, d);
    RwmhKernel kernel(Target::poly_tail(gamma), beta, xi, true);
    out.push_back({"log_lower", kernel,
                   {DriftFunction::logarithmic(), d, [alpha](double) { return alpha; }, DriftDirection::LowerBound,
                    "logarithmic V, lower bound"},
                   grid(d)});
  }
  return out;
}

HittingScenario hitting_scenario() {
  const double a = 1.0, omega = 2.0, beta = 0.5, xi = 1.0;
  const double d = super_exp_min_threshold(a, omega, beta, xi);
  return {RwmhKernel(Target::super_exp(a, omega), beta, xi, true), 2.0 * d, d,
          super_exp_drift_rate(a, omega, beta, xi, d)};
}

ExperimentResult run_drift(const ExperimentConfig& config) {
  ExperimentResult out;
  for (const auto& s : drift_scenarios()) {
    auto report = verify_drift(s.spec, s.kernel, s.grid);
    const std::string id = "drift:" + s.id;
    const double beta = s.kernel.beta();
    for (const auto& p : report.points) {
      out.rows.push_back({id, beta, std::nullopt, p.x, "generator", p.generator, std::nullopt});
      out.rows.push_back({id, beta, std::nullopt, p.x, "bound", p.bound, std::nullopt});
      out.rows.push_back({id, beta, std::nullopt, p.x, "margin", p.margin, std::nullopt});
    }
    out.rows.push_back({id, beta, std::nullopt, std::nullopt, "holds", report.holds ? 1.0 : 0.0, std::nullopt});
    out.rows.push_back({id, beta, std::nullopt, std::nullopt, "min_margin", report.min_margin, std::nullopt});
  }

  auto h = hitting_scenario();
  HittingTimeOptions options{config.n_rep, config.master_seed, config.workers, config.jump_budget};
  auto hit = hitting_time_moment(h.kernel, h.x0, h.d, h.alpha, options);
  const double beta = h.kernel.beta();
  out.rows.push_back({"hitting_time", beta, h.x0, std::nullopt, "exp_moment", hit.moment, hit.stderr_});
  out.rows.push_back({"hitting_time", beta, h.x0, std::nullopt, "alpha", h.alpha, std::nullopt});
  out.rows.push_back({"hitting_time", beta, h.x0, std::nullopt, "mean_tau", hit.mean_tau, std::nullopt});
  out.rows.push_back({"hitting_time", beta, h.x0, std::nullopt, "censored", static_cast<double>(hit.censored),
                      std::nullopt});
  out.replicates += hit.n_rep;
  out.degenerate += hit.censored;

  for (double gamma : {3.0, 4.0, 5.0}) {
    auto v = ergodicity_window(gamma, 0.5);
    out.rows.push_back({"ergodicity_window", std::nullopt, std::nullopt, std::nullopt, fmt::format("lo:gamma={}", gamma),
                        v.window ? v.window->first : std::nan(""), std::nullopt});
    out.rows.push_back({"ergodicity_window", std::nullopt, std::nullopt, std::nullopt, fmt::format("hi:gamma={}", gamma),
                        v.window ? v.window->second : std::nan(""), std::nullopt});
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  validate(config);
  switch (config.experiment) {
    case ExperimentKind::Table1_IS: return run_table1_is(config);
    case ExperimentKind::Table1_MCMC:
    case ExperimentKind::Fig2_Variance:
    case ExperimentKind::Custom: return run_chain_variance(config);
    case ExperimentKind::Fig1_KS: return run_fig1(config);
    case ExperimentKind::RiskFinite: return run_risk(config);
    case ExperimentKind::DriftVerify: return run_drift(config);
  }
  throw std::logic_error("unhandled experiment kind");
}

// ---------------------------------------------------------------- output

std::string format_table1(const std::vector<CsvRow>& is_rows, const std::vector<CsvRow>& mcmc_rows) {
  auto find = [](const std::vector<CsvRow>& rows, const std::string& id, double beta, std::optional<double> init,
                 const std::string& metric) -> std::string {
    for (const auto& r : rows)
      if (r.experiment_id == id && r.beta == beta && r.init == init && r.metric_name == metric)
        return fmt::format("{:.4g}", r.value);
    return "-";
  };
  std::vector<std::string> metrics;
  for (const auto& r : is_rows)
    if (std::find(metrics.begin(), metrics.end(), r.metric_name) == metrics.end()) metrics.push_back(r.metric_name);

  std::string out = fmt::format("{:<24}{:>10}{:>10}{:>12}{:>12}{:>12}{:>12}\n", "function", "IS b=0.4", "IS b=0.7",
                                "RWMH x0=.01", "RWMH x0=10", "ITMH x0=.01", "ITMH x0=10");
  for (const auto& m : metrics) {
    out += fmt::format("{:<24}{:>10}{:>10}{:>12}{:>12}{:>12}{:>12}\n", m.substr(m.find(':') + 1),
                       find(is_rows, "table1_is", 0.4, std::nullopt, m), find(is_rows, "table1_is", 0.7, std::nullopt, m),
                       find(mcmc_rows, "table1_rwmh", 1.0, 0.01, m), find(mcmc_rows, "table1_rwmh", 1.0, 10.0, m),
                       find(mcmc_rows, "table1_itmh", 0.7, 0.01, m), find(mcmc_rows, "table1_itmh", 0.7, 10.0, m));
  }
  return out;
}

void write_outputs(const ExperimentConfig& config, const ExperimentResult& result, double wall_seconds,
                   const std::string& csv_path) {
  std::filesystem::path path(csv_path);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + csv_path);
    write_csv(out, result.rows);
  }
  nlohmann::ordered_json meta;
  meta["config"] = format_config(config);
  meta["version"] = kVersion;
  meta["git_describe"] = kGitDescribe;
  meta["wall_time_seconds"] = wall_seconds;
  meta["replicates"] = result.replicates;
  meta["degenerate_replicates"] = result.degenerate;
  auto truths = nlohmann::ordered_json::array();
  for (const auto& t : result.truths)
    truths.push_back({{"function", t.function}, {"value", fmt_real(t.value)}, {"provenance", t.provenance}});
  meta["ground_truths"] = truths;
  if (!result.time_grid.empty()) {
    meta["time_grid"] = result.time_grid;
    meta["time_grid_source"] = result.time_grid_label;
    meta["time_unit"] = "normalized";
  }
  std::ofstream out(csv_path + ".meta.json");
  if (!out) throw std::runtime_error("cannot open " + csv_path + ".meta.json");
  out << meta.dump(2) << '\n';
}

RunSummary run(const ExperimentConfig& config) {
  RunSummary summary;
  auto start = std::chrono::steady_clock::now();
  summary.result = run_experiment(config);
  summary.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  summary.csv_path = config.output_path;
  summary.meta_path = config.output_path + ".meta.json";
  write_outputs(config, summary.result, summary.wall_seconds, summary.csv_path);
  const auto& r = summary.result;
  if (r.replicates > 0 &&
      static_cast<double>(r.degenerate) > config.degenerate_threshold * static_cast<double>(r.replicates))
    summary.exit_code = 3;
  return summary;
}

}  // namespace tempis::harness
