#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tempis/estimators.hpp"
#include "tempis/sampler.hpp"

namespace tempis {

/// One-sample Kolmogorov-Smirnov statistic sup |F_n - F|, exact from the sorted sample.
double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf);

struct KsPoint {
  double init;
  double t;
  double ks;
};

struct KsCurveOptions {
  std::size_t n_rep = 1000;
  std::uint64_t master_seed = 1;
  unsigned workers = 1;
};

/// For each initial state, simulates n_rep jump-process trajectories up to
/// max(time_grid), records Y_t at every grid time and compares the cross-section
/// with the target CDF. Grid times are in normalized time (see RwmhKernel::time_scale).
/// Rows are ordered by init, then t.
std::vector<KsPoint> ks_curve(const RwmhKernel& kernel, std::span<const double> inits,
                              std::span<const double> time_grid, const KsCurveOptions& options);

/// Merge analysis of KS curves sharing one time grid. A set of curves is merged
/// from the first grid time after which every pairwise gap stays below the threshold.
struct MergeReport {
  double threshold;
  std::optional<double> joint_merge_time;
  /// Per init: first time after which the gap to the reference curve stays below threshold.
  std::vector<std::optional<double>> merge_time_vs_reference;
};

MergeReport merge_analysis(std::span<const KsPoint> rows, std::span<const double> inits, double reference_init,
                           double threshold);

/// (n / N_rep) sum (estimate_k - truth)^2, with a standard error across replicates.
struct ReplicateVariance {
  double value;
  double stderr_;
  std::size_t degenerate;
};
ReplicateVariance replicate_variance(std::span<const EstimateRecord> estimates, std::size_t n, double truth);

// ---------------------------------------------------------------- drift

enum class DriftShape { BoundedExponential, BoundedPolynomial, Logarithmic, Constant };

/// Drift (Lyapunov) function candidates for the tempered jump process.
class DriftFunction {
 public:
  /// 2 - exp(-|x|/xi), in [1, 2].
  static DriftFunction bounded_exponential(double xi);
  /// 1 + xi^-nu - max(|x|, xi)^-nu, in [1, 1 + xi^-nu].
  static DriftFunction bounded_polynomial(double xi, double nu);
  /// log(1 + |x|).
  static DriftFunction logarithmic();
  static DriftFunction constant(double c);

  double operator()(double x) const;
  /// Second derivative for |x| > kink (symbolic).
  double second_derivative(double x) const;
  /// Sup of V, when bounded.
  std::optional<double> max_value() const;
  std::vector<double> breakpoints() const;
  DriftShape shape() const { return shape_; }
  double xi() const { return xi_; }
  double nu() const { return nu_; }

 private:
  DriftShape shape_ = DriftShape::Constant;
  double xi_ = 1.0;
  double nu_ = 0.0;
  double c_ = 1.0;
};

/// (A V)(x) = 1/(Z_beta pi(x)^(1-beta)) * integral [V(y) - V(x)] min(1, (pi(y)/pi(x))^beta) kappa(y - x) dy,
/// by quadrature over the proposal support. The rejection atom contributes nothing.
double generator_apply(const RwmhKernel& kernel, const std::function<double(double)>& v, double x,
                       std::span<const double> v_breakpoints = {});
double generator_apply(const RwmhKernel& kernel, const DriftFunction& v, double x);

enum class DriftDirection {
  UpperBound,  ///< (A V)(x) <= -alpha(x) V(x)
  LowerBound,  ///< (A V)(x) >= -alpha(x)
};

struct DriftCheckSpec {
  DriftFunction v;
  double threshold_d;
  std::function<double(double)> alpha;  ///< claimed rate, possibly state dependent
  DriftDirection direction;
  std::string label;
};

struct DriftPoint {
  double x;
  double generator;
  double bound;   ///< -alpha V(x) or -alpha(x)
  double margin;  ///< slack of the inequality; >= -tolerance means it holds
};

struct DriftReport {
  std::vector<DriftPoint> points;
  double tolerance;
  bool holds;
  double min_margin;
};

/// Evaluates the generator at every grid point (each |x| >= D) and reports
/// the margin of the claimed inequality.
DriftReport verify_drift(const DriftCheckSpec& spec, const RwmhKernel& kernel, std::span<const double> x_grid,
                         double tolerance = 1e-8);

/// Rate of the bounded-exponential drift for pi ~ exp(-a|x|^w) with the truncated kernel:
/// beta^(1/w)/49 * exp(a(1-beta)D^w - D/xi).
double super_exp_drift_rate(double a, double omega, double beta, double xi, double d);
/// Smallest admissible D for the rate above: max(xi, [a xi w (1-beta)]^(-1/(w-1))).
double super_exp_min_threshold(double a, double omega, double beta, double xi);

/// State-dependent rate phi(x) xi^3 kappa(xi) / (3 V_max Z_beta pi(x)^(1-beta))
/// with phi(x) = inf over [x-xi, x+xi] of |V''|.
double concave_drift_rate(const RwmhKernel& kernel, const DriftFunction& v, double x);

/// Rate in the lower bound (A V)(x) >= -alpha for V = log(1+|x|), pi = poly_tail(gamma):
/// (gamma beta - 1)(gamma beta + 2) xi^2 / (5 (gamma - 1) (1 + D)^(2 - gamma(1 - beta))).
double log_drift_rate(double gamma, double beta, double xi, double d);

// ---------------------------------------------------------------- ergodicity

struct ErgodicityVerdict {
  double gamma;
  double beta;
  bool uniformly_ergodic;
  /// (1/gamma, (gamma-2)/gamma) when nonempty.
  std::optional<std::pair<double, double>> window;
};

/// Uniform ergodicity of the tempered jump process for pi ~ (1+|x|)^-gamma: iff 1/gamma < beta < (gamma-2)/gamma.
ErgodicityVerdict ergodicity_window(double gamma, double beta);

// ---------------------------------------------------------------- hitting times

struct HittingTimeOptions {
  std::size_t n_rep = 500;
  std::uint64_t master_seed = 1;
  unsigned workers = 1;
  std::size_t jump_budget = 10'000'000;
};

struct HittingTimeReport {
  double moment;  ///< mean of exp(alpha tau_D) over uncensored replicates
  double stderr_;
  double mean_tau;
  std::size_t censored;
  std::size_t n_rep;
};

/// Monte Carlo E_x0[exp(alpha tau_D)], tau_D the first time |Y_t| <= D in
/// normalized time (simulated time multiplied by kernel.time_scale()).
HittingTimeReport hitting_time_moment(const RwmhKernel& kernel, double x0, double d, double alpha,
                                      const HittingTimeOptions& options);

}  // namespace tempis
