// Runs every acceptance criterion at its stated scale and tolerance.
// Prints one PASS/FAIL line per criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "oracles.hpp"
#include "tempis/diagnostics.hpp"
#include "tempis/estimators.hpp"
#include "tempis/harness/experiments.hpp"

using namespace tempis;
namespace h = tempis::harness;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::vector<double> trial_masses(const Trial& t, std::size_t n) {
  std::vector<double> q(n);
  double s = 0;
  for (std::size_t i = 0; i < n; ++i) s += q[i] = std::exp(t.log_density(static_cast<double>(i)));
  for (auto& v : q) v /= s;
  return q;
}

std::string fmt_list(const std::vector<double>& v) {
  std::string s;
  for (double x : v) s += (s.empty() ? "" : ", ") + fmt::format("{:.4g}", x);
  return s;
}

/// Large-atom target: mass p > 1/2 on a random atom, the rest spread at random.
std::vector<double> large_atom_target(std::mt19937_64& gen, std::size_t n, std::size_t& star, double& p) {
  std::uniform_real_distribution<double> u(0.5, 1.0);
  do p = u(gen);
  while (!(p > 0.5 && p < 1.0));
  star = gen() % n;
  auto rest = oracle::random_simplex(gen, n - 1);
  std::vector<double> pi(n);
  for (std::size_t i = 0, k = 0; i < n; ++i) pi[i] = i == star ? p : (1.0 - p) * rest[k++];
  return pi;
}

Outcome table1_is() {
  auto t0 = Clock::now();
  auto result = h::run_experiment(h::preset(h::ExperimentKind::Table1_IS));
  double secs = seconds_since(t0);
  const std::map<std::string, std::pair<double, double>> expected{
      {"ratio:indicator(-2,2)", {0.358, 0.546}}, {"ratio:power(2)", {0.576, 0.648}},
      {"ratio:power(3)", {0.305, 0.477}},        {"ratio:power(4)", {0.234, 0.383}},
      {"ratio:log_abs", {1.31, 1.06}}};
  double worst = 0;
  std::size_t matched = 0;
  for (const auto& r : result.rows) {
    auto it = expected.find(r.metric_name);
    if (it == expected.end()) continue;
    double want = *r.beta == 0.4 ? it->second.first : it->second.second;
    worst = std::max(worst, std::abs(r.value - want));
    ++matched;
  }
  bool pass = matched == 10 && worst <= 0.005 && secs < 1.0;
  return {pass, fmt::format("max |error| {:.2e} over {} cells, {:.3f} s", worst, matched, secs)};
}

Outcome table1_mcmc() {
  auto result = h::run_experiment(h::preset(h::ExperimentKind::Table1_MCMC));
  std::map<std::tuple<std::string, double, std::string>, double> v;
  std::vector<std::string> fs;
  for (const auto& r : result.rows) {
    if (r.metric_name.rfind("ratio:", 0) != 0) continue;
    v[{r.experiment_id, *r.init, r.metric_name}] = r.value;
    if (r.experiment_id == "table1_itmh" && *r.init == 0.01) fs.push_back(r.metric_name);
  }
  if (fs.size() != 5) return {false, "expected five functions"};
  bool a = true, b, c = true;
  std::vector<double> itmh_low, itmh_high, rw_low;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    double lo = v.at({"table1_itmh", 0.01, fs[i]}), hi = v.at({"table1_itmh", 10.0, fs[i]});
    itmh_low.push_back(lo);
    itmh_high.push_back(hi);
    if (i < 4 && !(lo >= 1.0 && lo <= 4.0 && hi >= 1.0 && hi <= 4.0)) a = false;
    if (!(std::abs(hi - lo) <= 0.5 * lo)) a = false;
    double rw = v.at({"table1_rwmh", 0.01, fs[i]});
    rw_low.push_back(rw);
    if (!(rw >= 2.5 && rw <= 7.0)) c = false;
  }
  double rw_x4 = v.at({"table1_rwmh", 10.0, "ratio:power(4)"});
  b = rw_x4 > 1e3;
  return {a && b && c, fmt::format("(a) {} ITMH x0=.01 [{}] x0=10 [{}]; (b) {} RWMH x0=10 x^4 {:.4g}; (c) {} RWMH x0=.01 [{}]",
                                   a ? "ok" : "FAIL", fmt_list(itmh_low), fmt_list(itmh_high), b ? "ok" : "FAIL",
                                   rw_x4, c ? "ok" : "FAIL", fmt_list(rw_low))};
}

Outcome minimax() {
  auto t0 = Clock::now();
  std::mt19937_64 gen(20240601);
  double worst_oracle = 0;
  for (int rep = 0; rep < 200; ++rep) {
    std::size_t n = 2 + gen() % 5;
    auto pi = oracle::random_simplex(gen, n), q = oracle::random_simplex(gen, n);
    double r = worst_case_risk_finite(pi, q).risk;
    worst_oracle = std::max(worst_oracle, std::abs(r - oracle::brute_force_risk(pi, q)));
  }
  double worst_formula = 0, worst_competitor_gap = INFINITY;
  bool beaten = false;
  for (int rep = 0; rep < 200; ++rep) {
    std::size_t n = 2 + gen() % 5, star;
    double p;
    auto pi = large_atom_target(gen, n, star, p);
    auto target = Target::finite(pi);
    auto m = minimax_trial_atom(target, static_cast<double>(star));
    double exact = 4 * p * (1 - p);
    double direct = worst_case_risk_finite(pi, trial_masses(m.trial, n)).risk;
    worst_formula = std::max({worst_formula, std::abs(m.risk - exact), std::abs(direct - exact)});
    for (int k = 0; k < 50; ++k) {
      double rc = worst_case_risk_finite(pi, oracle::random_simplex(gen, n)).risk;
      worst_competitor_gap = std::min(worst_competitor_gap, rc - m.risk);
      if (rc + 1e-9 < m.risk) beaten = true;
    }
  }
  double secs = seconds_since(t0);
  bool pass = worst_oracle <= 1e-3 && worst_formula <= 1e-9 && !beaten && secs < 30;
  return {pass, fmt::format("oracle max diff {:.2e}; 4p(1-p) max diff {:.2e}; min competitor excess {:.3e}; {:.2f} s",
                            worst_oracle, worst_formula, worst_competitor_gap, secs)};
}

Outcome lower_bounds() {
  std::mt19937_64 gen(777);
  double two_point = INFINITY, small_atom = INFINITY, multi = INFINITY;
  for (int rep = 0; rep < 500; ++rep) {
    std::size_t n = 2 + gen() % 7;
    auto pi = oracle::random_simplex(gen, n), q = oracle::random_simplex(gen, n);
    std::vector<std::size_t> e;
    while (e.empty() || e.size() == n) {
      e.clear();
      for (std::size_t i = 0; i < n; ++i)
        if (gen() % 2) e.push_back(i);
    }
    double p = 0;
    for (auto i : e) p += pi[i];
    auto target = Target::finite(pi);
    double s2 = asymptotic_variance(Trial(target, ExplicitFinite{q}), target, two_point_test_function(target, e));
    two_point = std::min(two_point, s2 - 4 * p * (1 - p));
  }
  for (int rep = 0; rep < 500; ++rep) {
    // with two atoms only (1/2, 1/2) qualifies
    std::size_t n = 3 + gen() % 6;
    std::vector<double> pi;
    do pi = oracle::random_simplex(gen, n);
    while (*std::max_element(pi.begin(), pi.end()) > 0.5);
    auto q = oracle::random_simplex(gen, n);
    small_atom = std::min(small_atom, worst_case_risk_finite(pi, q).risk - 1.0);
  }
  std::uniform_real_distribution<double> unit(0.01, 0.99);
  for (int rep = 0; rep < 200; ++rep) {
    std::size_t n = 2 + gen() % 5, star;
    double p;
    auto pi = large_atom_target(gen, n, star, p);
    auto target = Target::finite(pi);
    MultipleIsPlan plan(unit(gen), unit(gen), Trial(target, ExplicitFinite{oracle::random_simplex(gen, n)}),
                        Trial(target, ExplicitFinite{oracle::random_simplex(gen, n)}), 100, 100);
    std::vector<std::size_t> e{star};
    multi = std::min(multi, multiple_is_asym_variance(plan, target, two_point_test_function(target, e)) - 4 * p * (1 - p));
  }
  bool pass = two_point >= -1e-9 && small_atom >= -1e-9 && multi >= -1e-9;
  return {pass, fmt::format("min slack: two-point {:.3e}, small-atom risk-1 {:.3e}, multiple IS {:.3e}", two_point, small_atom, multi)};
}

Outcome drift() {
  auto t0 = Clock::now();
  bool pass = true;
  std::string detail;
  for (const auto& s : h::drift_scenarios()) {
    auto r = verify_drift(s.spec, s.kernel, s.grid);
    pass = pass && r.holds && r.min_margin >= 0.0 && r.points.size() == 20;
    detail += fmt::format("{} min margin {:.3e}; ", s.id, r.min_margin);
  }
  double secs = seconds_since(t0);
  pass = pass && secs < 30;
  return {pass, detail + fmt::format("{:.2f} s", secs)};
}

Outcome fig1() {
  auto c = h::preset(h::ExperimentKind::Fig1_KS);
  c.n_rep = 2000;
  auto result = h::run_experiment(c);
  std::optional<double> joint;
  std::map<double, double> merge;
  for (const auto& r : result.rows) {
    if (r.experiment_id != "fig1_merge") continue;
    if (*r.beta == 0.55 && r.metric_name == "joint_merge_time") joint = r.value;
    if (*r.beta == 0.65 && r.metric_name == "merge_time") merge[*r.init] = r.value;
  }
  if (!joint || !merge.count(20) || !merge.count(100) || !merge.count(500)) return {false, "merge rows missing"};
  bool a = std::isfinite(*joint);
  bool b = merge[20] < merge[100] && merge[100] < merge[500];
  return {a && b, fmt::format("beta=0.55 joint merge t={:.4g}; beta=0.65 merge times {:.4g} < {:.4g} < {:.4g}", *joint,
                              merge[20], merge[100], merge[500])};
}

Outcome ergodicity() {
  auto v = ergodicity_window(5, 0.55);
  bool pass = v.window && v.window->first == 0.2 && v.window->second == 0.6;
  for (int k = 1; k < 100; ++k) {
    double beta = k / 100.0;
    bool want = beta > 0.2 && beta < 0.6;
    if (ergodicity_window(5, beta).uniformly_ergodic != want) pass = false;
  }
  for (double g = 1.01; g <= 3.0 + 1e-12; g += 0.01)
    for (double beta : {0.05, 0.3, 0.5, 0.9})
      if (ergodicity_window(std::min(g, 3.0), beta).window || ergodicity_window(std::min(g, 3.0), beta).uniformly_ergodic)
        pass = false;
  return {pass, v.window ? fmt::format("gamma=5 window ({}, {}); gamma<=3 empty", v.window->first, v.window->second)
                         : std::string("gamma=5 window empty")};
}

Outcome hitting() {
  auto s = h::hitting_scenario();
  HittingTimeOptions o;
  o.n_rep = 2000;
  auto r = hitting_time_moment(s.kernel, s.x0, s.d, s.alpha, o);
  bool pass = r.moment <= 2.0 + 3.0 * r.stderr_ && r.censored == 0;
  return {pass, fmt::format("E exp(alpha tau) = {:.5f} +- {:.5f} (alpha {:.6g}, x0 {}, D {}), censored {}", r.moment,
                            r.stderr_, s.alpha, s.x0, s.d, r.censored)};
}

Outcome self_consistency() {
  auto g = Target::gaussian();
  const std::size_t n = 10000, reps = 2000;
  const std::vector<std::string> names{"indicator(-2,2)", "power(2)", "power(3)", "power(4)", "log_abs"};
  bool pass = true;
  std::string detail;
  for (double beta : {0.4, 0.7}) {
    Trial q(g, Tempered{beta});
    WeightFunction w(g, q);
    std::vector<TestFunction> fs;
    std::vector<std::vector<EstimateRecord>> est(names.size(), std::vector<EstimateRecord>(reps));
    for (const auto& name : names) fs.push_back(TestFunction::parse(name));
    std::vector<double> xs(n);
    for (std::size_t r = 0; r < reps; ++r) {
      Rng rng = Rng::stream(31337 + static_cast<std::uint64_t>(beta * 10), r);
      for (auto& x : xs) x = q.sample(rng);
      for (std::size_t k = 0; k < fs.size(); ++k) est[k][r] = snis(xs, fs[k], w);
    }
    for (std::size_t k = 0; k < fs.size(); ++k) {
      double truth = h::ground_truth(g, fs[k]).value;
      auto rv = replicate_variance(est[k], n, truth);
      double sigma2 = asymptotic_variance(q, g, fs[k]);
      double z = (rv.value - sigma2) / rv.stderr_;
      if (!(std::abs(z) <= 3.0)) pass = false;
      detail += fmt::format("b={} {} z={:+.2f}; ", beta, names[k], z);
    }
  }
  return {pass, detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"table1-is-columns", table1_is},
      {"table1-mcmc-columns", table1_mcmc},
      {"minimax-correctness", minimax},
      {"lower-bound-properties", lower_bounds},
      {"drift-verification", drift},
      {"fig1-qualitative", fig1},
      {"ergodicity-window", ergodicity},
      {"hitting-time-bound", hitting},
      {"iid-self-consistency", self_consistency},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    auto t0 = Clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    fmt::print("{} {} ({:.1f} s): {}\n", o.pass ? "PASS" : "FAIL", name, seconds_since(t0), o.detail);
    std::fflush(stdout);
    failures += !o.pass;
  }
  fmt::print("{} of {} criteria passed\n", criteria.size() - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
