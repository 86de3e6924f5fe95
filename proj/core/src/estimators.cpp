#include "tempis/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <fmt/core.h>

#include "tempis/numerics.hpp"
#include "tempis/sampler.hpp"

namespace tempis {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_samples(std::span<const double> samples, const char* what) {
  if (samples.empty()) throw std::invalid_argument(fmt::format("{}: no samples", what));
}

void validate_distribution(std::span<const double> p, bool strictly_positive, const char* what) {
  double total = 0.0;
  for (double v : p) {
    if (!std::isfinite(v) || v < 0.0 || (strictly_positive && v == 0.0))
      throw std::invalid_argument(fmt::format("{}: invalid probability {}", what, v));
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument(fmt::format("{}: probabilities sum to {:.17g}", what, total));
}

}  // namespace

std::string to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::Plain: return "plain";
    case EstimatorKind::SelfNormalized: return "self_normalized";
    case EstimatorKind::CtmcTimeAverage: return "ctmc_time_average";
    case EstimatorKind::CombinedMultiple: return "combined_multiple";
  }
  return "unknown";
}

std::string to_string(RiskCase c) {
  switch (c) {
    case RiskCase::InfiniteWeight: return "infinite_weight";
    case RiskCase::TiedTop: return "tied_top";
    case RiskCase::LambdaRoot: return "lambda_root";
    case RiskCase::NoAtomEssSup: return "no_atom_ess_sup";
    case RiskCase::LargeAtomClosedForm: return "large_atom_closed_form";
  }
  return "unknown";
}

// ---------------------------------------------------------------- estimators

EstimateRecord plain_is(std::span<const double> samples, const TestFunction& f, const WeightFunction& w) {
  require_samples(samples, "plain_is");
  if (w.mode() != Normalization::Exact)
    throw std::invalid_argument("plain_is: needs exact (normalized) weights; call WeightFunction::exact()");
  double acc = 0.0;
  for (double x : samples) acc += f(x) * w.weight(x);
  return {acc / static_cast<double>(samples.size()), samples.size(), EstimatorKind::Plain, 0, samples.front(), false};
}

EstimateRecord snis_from_log_weights(std::span<const double> samples, std::span<const double> log_weights,
                                     const TestFunction& f) {
  require_samples(samples, "snis");
  if (samples.size() != log_weights.size()) throw std::invalid_argument("snis: sample/weight length mismatch");
  EstimateRecord rec{0.0, samples.size(), EstimatorKind::SelfNormalized, 0, samples.front(), false};
  double top = *std::max_element(log_weights.begin(), log_weights.end());
  if (top == -kInf) {
    rec.degenerate = true;
    return rec;
  }
  if (top == kInf) {
    // Infinite weights dominate: average f over those states.
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i)
      if (log_weights[i] == kInf) num += f(samples[i]), den += 1.0;
    rec.value = num / den;
    return rec;
  }
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    double wi = std::exp(log_weights[i] - top);
    num += f(samples[i]) * wi;
    den += wi;
  }
  rec.value = num / den;
  return rec;
}

EstimateRecord snis(std::span<const double> samples, const TestFunction& f, const WeightFunction& w) {
  require_samples(samples, "snis");
  std::vector<double> lw(samples.size());
  std::transform(samples.begin(), samples.end(), lw.begin(), [&](double x) { return w.log_weight(x); });
  return snis_from_log_weights(samples, lw, f);
}

EstimateRecord snis_ctmc(const JumpPath& path, const TestFunction& f) {
  if (path.states.empty()) throw std::invalid_argument("snis_ctmc: empty path");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < path.states.size(); ++i) {
    num += f(path.states[i]) * path.holding_times[i];
    den += path.holding_times[i];
  }
  EstimateRecord rec{0.0, path.states.size(), EstimatorKind::CtmcTimeAverage, path.seed, path.states.front(), false};
  if (!(den > 0.0)) {
    rec.degenerate = true;
    return rec;
  }
  rec.value = num / den;
  return rec;
}

// ---------------------------------------------------------------- variances

double asymptotic_variance(const Trial& trial, const Target& target, const TestFunction& f) {
  auto w = weight(trial, target).exact();
  if (target.is_discrete()) {
    const auto& pi = std::get<FiniteDiscrete>(target.kind()).probabilities;
    double mu = target.expectation(f);
    double acc = 0.0;
    for (std::size_t i = 0; i < pi.size(); ++i) {
      double d = f(static_cast<double>(i)) - mu;
      if (d == 0.0) continue;
      acc += pi[i] * d * d * w.weight(static_cast<double>(i));
    }
    return acc;
  }
  double mu = target.expectation(f);
  if (!std::isfinite(mu)) return kInf;
  double log_z = *target.log_normalizer();
  auto integrand = [&](double x) {
    double d = f(x) - mu;
    if (d == 0.0) return 0.0;
    return d * d * std::exp(target.log_density(x) - log_z + w.log_weight(x));
  };
  std::vector<double> points = target.breakpoints();
  points.insert(points.end(), f.breakpoints().begin(), f.breakpoints().end());
  if (const auto* s = std::get_if<SetMixture>(&trial.kind())) {
    points.push_back(s->lo);
    points.push_back(s->hi);
  }
  auto result = numerics::integrate_real_line(integrand, points);
  return result.divergent ? kInf : result.value;
}

double target_variance(const Target& target, const TestFunction& f) {
  return asymptotic_variance(Trial(target, Tempered{1.0}), target, f);
}

// ---------------------------------------------------------------- worst-case risk

RiskReport worst_case_risk_finite(std::span<const double> pi, std::span<const double> q) {
  if (pi.size() < 2) throw std::invalid_argument("worst_case_risk_finite: need N >= 2");
  if (pi.size() != q.size()) throw std::invalid_argument("worst_case_risk_finite: length mismatch");
  validate_distribution(pi, true, "worst_case_risk_finite(pi)");
  validate_distribution(q, false, "worst_case_risk_finite(q)");

  const std::size_t n = pi.size();
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = q[i] > 0.0 ? pi[i] / q[i] : kInf;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return w[a] > w[b]; });
  const double w1 = w[order[0]];
  const double w2 = w[order[1]];

  RiskReport report;
  if (w1 == kInf) {
    report.risk = kInf;
    report.case_tag = RiskCase::InfiniteWeight;
    return report;
  }

  if (w1 - w2 <= 1e-10 * w1) {
    // Two-atom witness on the tied top pair.
    std::size_t i = order[0], j = order[1];
    std::vector<double> f(n, 0.0);
    double s = pi[i] + pi[j];
    f[i] = std::sqrt(pi[j] / (pi[i] * s));
    f[j] = -std::sqrt(pi[i] / (pi[j] * s));
    report.risk = w1;
    report.case_tag = RiskCase::TiedTop;
    report.witness = std::move(f);
    return report;
  }

  auto g = [&](double lambda) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += pi[i] / (w[i] - lambda);
    return acc;
  };
  const double eps = 1e-12 * (w1 - w2);
  const double lambda = numerics::bisect_increasing(g, w2 + eps, w1 - eps, 1e-12);

  std::vector<double> f(n);
  double norm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    f[i] = 1.0 / (w[i] - lambda);
    norm += pi[i] * f[i] * f[i];
  }
  norm = std::sqrt(norm);
  for (double& v : f) v /= norm;

  report.risk = lambda;
  report.lambda = lambda;
  report.case_tag = RiskCase::LambdaRoot;
  report.witness = std::move(f);
  return report;
}

MinimaxAtomTrial minimax_trial_atom(const Target& target, std::size_t atom) {
  if (!target.is_discrete()) throw std::invalid_argument("minimax_trial_atom: target has no atoms");
  const auto& pi = std::get<FiniteDiscrete>(target.kind()).probabilities;
  if (atom >= pi.size()) throw std::invalid_argument("minimax_trial_atom: atom index out of range");
  const double p = pi[atom];
  if (!(p > 0.5))
    throw std::invalid_argument(fmt::format(
        "minimax_trial_atom: atom mass {} is not above 1/2, so the target itself is the minimax trial", p));
  return {Trial(target, AtomMixture{atom, 0.5}), 4.0 * p * (1.0 - p)};
}

double trial_family_risk(double p, double c) {
  if (!(p > 0.5 && p < 1.0)) throw std::invalid_argument("trial_family_risk: need 1/2 < p < 1");
  if (!(c > 0.0 && c < 1.0)) throw std::invalid_argument("trial_family_risk: need 0 < c < 1");
  return p * (1.0 - p) / (c * (1.0 - c));
}

double set_trial_risk_bound(double p, double r) {
  if (!(p > 0.5 && p < 1.0)) throw std::invalid_argument("set_trial_risk_bound: need 1/2 < p < 1");
  if (!(r >= 0.0)) throw std::invalid_argument("set_trial_risk_bound: need r >= 0");
  return 4.0 * p * (1.0 - p) + (p - 0.5) * p * p * r * r;
}

ConcentratedSetTrial concentrated_set_trial(const Target& target, double lo, double hi, double c,
                                            std::optional<double> oscillation) {
  Trial trial(target, SetMixture{lo, hi, c});
  double p = *trial.reference_mass();
  ConcentratedSetTrial out{trial, p, (1.0 - p) < c && c < p, std::nullopt};
  if (oscillation && c == 0.5 && p > 0.5) out.risk_bound = set_trial_risk_bound(p, *oscillation);
  return out;
}

// ---------------------------------------------------------------- multiple IS

MultipleIsPlan::MultipleIsPlan(double t, double delta, Trial trial_x, Trial trial_y, std::size_t n_x,
                               std::size_t n_y)
    : t_(t), delta_(delta), trial_x_(std::move(trial_x)), trial_y_(std::move(trial_y)), n_x_(n_x), n_y_(n_y) {
  if (!(t > 0.0 && t < 1.0)) throw std::invalid_argument("multiple IS plan: need 0 < t < 1");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("multiple IS plan: need 0 < delta < 1");
}

EstimateRecord combined_multiple_is(const MultipleIsPlan& plan, const Target& target,
                                    std::span<const double> samples_x, std::span<const double> samples_y,
                                    const TestFunction& f) {
  auto ex = snis(samples_x, f, weight(plan.trial_x(), target));
  auto ey = snis(samples_y, f, weight(plan.trial_y(), target));
  EstimateRecord rec{0.0, samples_x.size() + samples_y.size(), EstimatorKind::CombinedMultiple, 0,
                     samples_x.front(), ex.degenerate || ey.degenerate};
  if (!rec.degenerate) rec.value = plan.t() * ex.value + (1.0 - plan.t()) * ey.value;
  return rec;
}

double multiple_is_asym_variance(const MultipleIsPlan& plan, const Target& target, const TestFunction& f) {
  double t = plan.t(), d = plan.delta();
  double vx = asymptotic_variance(plan.trial_x(), target, f);
  double vy = asymptotic_variance(plan.trial_y(), target, f);
  return t * t / d * vx + (1.0 - t) * (1.0 - t) / (1.0 - d) * vy;
}

TestFunction two_point_test_function(std::function<bool(double)> in_e, double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("two_point_test_function: need 0 < p < 1");
  double hi = std::sqrt((1.0 - p) / p);
  double lo = -std::sqrt(p / (1.0 - p));
  return TestFunction(fmt::format("two_point({})", p),
                      [in_e = std::move(in_e), hi, lo](double x) { return in_e(x) ? hi : lo; });
}

TestFunction two_point_test_function(const Target& target, std::span<const std::size_t> atoms) {
  if (!target.is_discrete()) throw std::invalid_argument("two_point_test_function: target is not finite");
  const auto& pi = std::get<FiniteDiscrete>(target.kind()).probabilities;
  std::vector<bool> member(pi.size(), false);
  double p = 0.0;
  for (auto a : atoms) {
    if (a >= pi.size()) throw std::invalid_argument("two_point_test_function: atom index out of range");
    if (!member[a]) p += pi[a];
    member[a] = true;
  }
  return two_point_test_function(
      [member](double x) {
        auto i = static_cast<std::size_t>(x);
        return x >= 0.0 && i < member.size() && static_cast<double>(i) == x && member[i];
      },
      p);
}

}  // namespace tempis
