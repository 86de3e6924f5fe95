#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tempis/functions.hpp"
#include "tempis/targets.hpp"

namespace tempis {

struct JumpPath;

enum class EstimatorKind { Plain, SelfNormalized, CtmcTimeAverage, CombinedMultiple };

std::string to_string(EstimatorKind kind);

/// One replicate's estimate of Pi(f).
struct EstimateRecord {
  double value = 0.0;
  std::size_t n = 0;
  EstimatorKind kind = EstimatorKind::SelfNormalized;
  std::uint64_t seed = 0;
  double init_state = 0.0;
  /// Every weight vanished (log weight -inf); `value` is meaningless and set to 0.
  bool degenerate = false;
};

/// (1/n) sum f(X_i) w(X_i). Needs an Exact weight function.
EstimateRecord plain_is(std::span<const double> samples, const TestFunction& f, const WeightFunction& w);

/// sum f(X_i) w(X_i) / sum w(X_i), evaluated with the largest log weight shifted out.
EstimateRecord snis(std::span<const double> samples, const TestFunction& f, const WeightFunction& w);

/// Same estimator from precomputed log weights.
EstimateRecord snis_from_log_weights(std::span<const double> samples, std::span<const double> log_weights,
                                     const TestFunction& f);

/// Time average of f along a jump path: sum f(X_i) W_i / sum W_i.
EstimateRecord snis_ctmc(const JumpPath& path, const TestFunction& f);

/// sigma^2(Q, f) = Pi([f - Pi(f)]^2 w) with the exact weight; +inf when divergent.
double asymptotic_variance(const Trial& trial, const Target& target, const TestFunction& f);

/// sigma^2(Pi, f), the variance of f under the target.
double target_variance(const Target& target, const TestFunction& f);

enum class RiskCase { InfiniteWeight, TiedTop, LambdaRoot, NoAtomEssSup, LargeAtomClosedForm };

std::string to_string(RiskCase c);

/// Worst-case variance ratio R(Q, L2(Pi)) over all square-integrable f.
struct RiskReport {
  double risk = 0.0;
  RiskCase case_tag = RiskCase::TiedTop;
  std::optional<double> lambda;
  /// A maximizing test function on the atoms (mean zero, unit variance under Pi).
  std::optional<std::vector<double>> witness;
};

/// Worst-case risk of trial q for a finite target pi. The largest weight
/// w_(1) decides: infinite, tied with w_(2), or the root of
/// sum pi_i / (w_i - lambda) = 0 on (w_(2), w_(1)).
RiskReport worst_case_risk_finite(std::span<const double> pi, std::span<const double> q);

struct MinimaxAtomTrial {
  Trial trial;
  double risk;  ///< 4 p (1 - p)
};

/// Minimax trial for a target with an atom of mass p > 1/2: mass 1/2 on the atom,
/// pi / (2(1 - p)) elsewhere. Throws std::invalid_argument when p <= 1/2, where
/// the target itself is minimax.
MinimaxAtomTrial minimax_trial_atom(const Target& target, std::size_t atom);

/// p(1 - p) / (c(1 - c)): risk of the trial that puts mass c on an atom of mass p.
double trial_family_risk(double p, double c);

struct ConcentratedSetTrial {
  Trial trial;
  double set_mass;           ///< Pi(A)
  bool in_efficiency_window; ///< 1 - Pi(A) < c < Pi(A)
  /// 4p(1-p) + (p - 1/2) p^2 r^2, reported when c = 1/2 and an oscillation bound r is given.
  std::optional<double> risk_bound;
};

ConcentratedSetTrial concentrated_set_trial(const Target& target, double lo, double hi, double c,
                                            std::optional<double> oscillation = std::nullopt);

/// Upper bound 4p(1-p) + (p - 1/2) p^2 r^2 on the risk over functions with oscillation <= r on A.
double set_trial_risk_bound(double p, double r);

/// Two-trial importance sampling with mixing weight t and sample fraction delta.
class MultipleIsPlan {
 public:
  MultipleIsPlan(double t, double delta, Trial trial_x, Trial trial_y, std::size_t n_x, std::size_t n_y);

  double t() const { return t_; }
  double delta() const { return delta_; }
  const Trial& trial_x() const { return trial_x_; }
  const Trial& trial_y() const { return trial_y_; }
  std::size_t n_x() const { return n_x_; }
  std::size_t n_y() const { return n_y_; }
  std::size_t n() const { return n_x_ + n_y_; }

 private:
  double t_, delta_;
  Trial trial_x_, trial_y_;
  std::size_t n_x_, n_y_;
};

/// t * SNIS_X + (1 - t) * SNIS_Y. Degenerate if either batch is.
EstimateRecord combined_multiple_is(const MultipleIsPlan& plan, const Target& target,
                                    std::span<const double> samples_x, std::span<const double> samples_y,
                                    const TestFunction& f);

/// (t^2/delta) sigma^2(Q_X, f) + ((1-t)^2/(1-delta)) sigma^2(Q_Y, f).
double multiple_is_asym_variance(const MultipleIsPlan& plan, const Target& target, const TestFunction& f);

/// sqrt((1-p)/p) on E and -sqrt(p/(1-p)) off E; mean zero and unit variance when Pi(E) = p.
TestFunction two_point_test_function(std::function<bool(double)> in_e, double p);

/// Convenience: E given as a set of atom indices of a finite target.
TestFunction two_point_test_function(const Target& target, std::span<const std::size_t> atoms);

}  // namespace tempis
