#include "tempis/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include <fmt/core.h>

#include "tempis/numerics.hpp"
#include "tempis/parallel.hpp"

namespace tempis {

// ---------------------------------------------------------------- KS

double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("ks_statistic: no samples");
  std::vector<double> sorted(samples.begin(), samples.end());
  for (double x : sorted)
    if (std::isnan(x)) throw std::invalid_argument("ks_statistic: NaN sample");
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    double f = cdf(sorted[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

std::vector<KsPoint> ks_curve(const RwmhKernel& kernel, std::span<const double> inits,
                              std::span<const double> time_grid, const KsCurveOptions& options) {
  if (options.n_rep < 100) throw std::invalid_argument("ks_curve: need n_rep >= 100");
  if (time_grid.empty()) throw std::invalid_argument("ks_curve: empty time grid");
  if (!std::is_sorted(time_grid.begin(), time_grid.end()) || time_grid.front() < 0.0)
    throw std::invalid_argument("ks_curve: time grid must be sorted and non-negative");

  const std::size_t n_rep = options.n_rep;
  const std::size_t g_count = time_grid.size();
  const Target& target = kernel.target();
  auto cdf = [&target](double x) { return target.cdf(x); };
  const double scale = kernel.time_scale();

  std::vector<KsPoint> rows;
  rows.reserve(inits.size() * g_count);
  for (std::size_t ii = 0; ii < inits.size(); ++ii) {
    const double x0 = inits[ii];
    // states[g * n_rep + r] = Y_{t_g} of replicate r
    std::vector<double> states(g_count * n_rep);
    parallel_for(n_rep, options.workers, [&](std::size_t r) {
      ReplicateStreams streams(options.master_seed, ii * n_rep + r);
      JumpProcess process(kernel, x0, streams);
      process.draw_holding();
      std::size_t g = 0;
      while (g < g_count) {
        if (time_grid[g] < process.time() * scale) {
          states[g * n_rep + r] = process.state();
          ++g;
        } else {
          process.jump();
          process.draw_holding();
        }
      }
    });
    for (std::size_t g = 0; g < g_count; ++g) {
      std::span<const double> slice(states.data() + g * n_rep, n_rep);
      rows.push_back({x0, time_grid[g], ks_statistic(slice, cdf)});
    }
  }
  return rows;
}

MergeReport merge_analysis(std::span<const KsPoint> rows, std::span<const double> inits, double reference_init,
                           double threshold) {
  std::map<double, std::vector<std::pair<double, double>>> curves;
  for (const auto& r : rows) curves[r.init].emplace_back(r.t, r.ks);
  auto curve = [&](double init) -> const std::vector<std::pair<double, double>>& {
    auto it = curves.find(init);
    if (it == curves.end()) throw std::invalid_argument(fmt::format("merge_analysis: no curve for init {}", init));
    return it->second;
  };
  const auto& ref = curve(reference_init);
  const std::size_t g_count = ref.size();
  for (double init : inits)
    if (curve(init).size() != g_count) throw std::invalid_argument("merge_analysis: curves on different grids");

  // First index from which pred(g) holds for every later g.
  auto settle = [&](auto&& pred) -> std::optional<double> {
    std::optional<std::size_t> start;
    for (std::size_t g = g_count; g-- > 0;) {
      if (!pred(g)) break;
      start = g;
    }
    if (!start) return std::nullopt;
    return ref[*start].first;
  };

  MergeReport report{threshold, std::nullopt, {}};
  report.joint_merge_time = settle([&](std::size_t g) {
    for (std::size_t a = 0; a < inits.size(); ++a)
      for (std::size_t b = a + 1; b < inits.size(); ++b)
        if (std::abs(curve(inits[a])[g].second - curve(inits[b])[g].second) >= threshold) return false;
    return true;
  });
  for (double init : inits) {
    const auto& c = curve(init);
    report.merge_time_vs_reference.push_back(
        settle([&](std::size_t g) { return std::abs(c[g].second - ref[g].second) < threshold; }));
  }
  return report;
}

ReplicateVariance replicate_variance(std::span<const EstimateRecord> estimates, std::size_t n, double truth) {
  if (estimates.empty()) throw std::invalid_argument("replicate_variance: no estimates");
  std::vector<double> terms;
  terms.reserve(estimates.size());
  std::size_t degenerate = 0;
  for (const auto& e : estimates) {
    if (e.n != n) throw std::invalid_argument(fmt::format("replicate_variance: mixed n ({} vs {})", e.n, n));
    if (e.degenerate) {
      ++degenerate;
      continue;
    }
    double d = e.value - truth;
    terms.push_back(static_cast<double>(n) * d * d);
  }
  if (terms.empty()) return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN(), degenerate};
  double mean = 0.0;
  for (double t : terms) mean += t;
  mean /= static_cast<double>(terms.size());
  double ss = 0.0;
  for (double t : terms) ss += (t - mean) * (t - mean);
  double sd = terms.size() > 1 ? std::sqrt(ss / static_cast<double>(terms.size() - 1)) : 0.0;
  return {mean, sd / std::sqrt(static_cast<double>(terms.size())), degenerate};
}

// ---------------------------------------------------------------- drift functions

DriftFunction DriftFunction::bounded_exponential(double xi) {
  if (!(xi > 0.0)) throw std::invalid_argument("bounded_exponential: need xi > 0");
  DriftFunction v;
  v.shape_ = DriftShape::BoundedExponential;
  v.xi_ = xi;
  return v;
}

DriftFunction DriftFunction::bounded_polynomial(double xi, double nu) {
  if (!(xi > 0.0) || !(nu > 0.0)) throw std::invalid_argument("bounded_polynomial: need xi > 0 and nu > 0");
  DriftFunction v;
  v.shape_ = DriftShape::BoundedPolynomial;
  v.xi_ = xi;
  v.nu_ = nu;
  return v;
}

DriftFunction DriftFunction::logarithmic() {
  DriftFunction v;
  v.shape_ = DriftShape::Logarithmic;
  return v;
}

DriftFunction DriftFunction::constant(double c) {
  DriftFunction v;
  v.shape_ = DriftShape::Constant;
  v.c_ = c;
  return v;
}

double DriftFunction::operator()(double x) const {
  const double ax = std::abs(x);
  switch (shape_) {
    case DriftShape::BoundedExponential: return 2.0 - std::exp(-ax / xi_);
    case DriftShape::BoundedPolynomial: return 1.0 + std::pow(xi_, -nu_) - std::pow(std::max(ax, xi_), -nu_);
    case DriftShape::Logarithmic: return std::log1p(ax);
    case DriftShape::Constant: return c_;
  }
  return 0.0;
}

double DriftFunction::second_derivative(double x) const {
  const double ax = std::abs(x);
  switch (shape_) {
    case DriftShape::BoundedExponential: return -std::exp(-ax / xi_) / (xi_ * xi_);
    case DriftShape::BoundedPolynomial: return ax > xi_ ? -nu_ * (nu_ + 1.0) * std::pow(ax, -nu_ - 2.0) : 0.0;
    case DriftShape::Logarithmic: return -1.0 / ((1.0 + ax) * (1.0 + ax));
    case DriftShape::Constant: return 0.0;
  }
  return 0.0;
}

std::optional<double> DriftFunction::max_value() const {
  switch (shape_) {
    case DriftShape::BoundedExponential: return 2.0;
    case DriftShape::BoundedPolynomial: return 1.0 + std::pow(xi_, -nu_);
    case DriftShape::Logarithmic: return std::nullopt;
    case DriftShape::Constant: return c_;
  }
  return std::nullopt;
}

std::vector<double> DriftFunction::breakpoints() const {
  switch (shape_) {
    case DriftShape::BoundedPolynomial: return {-xi_, xi_};
    case DriftShape::Constant: return {};
    default: return {0.0};
  }
}

// ---------------------------------------------------------------- generator

double generator_apply(const RwmhKernel& kernel, const std::function<double(double)>& v, double x,
                       std::span<const double> v_breakpoints) {
  const Target& target = kernel.target();
  const double beta = kernel.beta();
  const double log_pi_x = target.log_density(x);
  const double vx = v(x);
  auto integrand = [&](double y) {
    double dv = v(y) - vx;
    if (dv == 0.0) return 0.0;
    double log_ratio = beta * (target.log_density(y) - log_pi_x);
    double acc = log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
    return dv * acc * kernel.proposal_density(y - x);
  };
  double reach = kernel.truncated() ? kernel.halfwidth() : 40.0 * kernel.proposal_sd();
  std::vector<double> points(v_breakpoints.begin(), v_breakpoints.end());
  auto tb = target.breakpoints();
  points.insert(points.end(), tb.begin(), tb.end());
  points.push_back(x);
  double integral = numerics::integrate(integrand, x - reach, x + reach, points, 1e-12);
  return integral / (kernel.time_scale() * std::exp(kernel.log_holding_mean(x)));
}

double generator_apply(const RwmhKernel& kernel, const DriftFunction& v, double x) {
  auto bp = v.breakpoints();
  return generator_apply(kernel, [&v](double y) { return v(y); }, x, bp);
}

DriftReport verify_drift(const DriftCheckSpec& spec, const RwmhKernel& kernel, std::span<const double> x_grid,
                         double tolerance) {
  if (x_grid.empty()) throw std::invalid_argument("verify_drift: empty grid");
  DriftReport report{{}, tolerance, true, std::numeric_limits<double>::infinity()};
  for (double x : x_grid) {
    if (std::abs(x) < spec.threshold_d)
      throw std::invalid_argument(fmt::format("verify_drift: grid point {} lies inside (-D, D), D = {}", x, spec.threshold_d));
    double av = generator_apply(kernel, spec.v, x);
    double a = spec.alpha(x);
    DriftPoint p{x, av, 0.0, 0.0};
    if (spec.direction == DriftDirection::UpperBound) {
      p.bound = -a * spec.v(x);
      p.margin = p.bound - av;
    } else {
      p.bound = -a;
      p.margin = av - p.bound;
    }
    report.min_margin = std::min(report.min_margin, p.margin);
    report.holds = report.holds && p.margin >= -tolerance;
    report.points.push_back(p);
  }
  return report;
}

double super_exp_drift_rate(double a, double omega, double beta, double xi, double d) {
  return std::pow(beta, 1.0 / omega) / 49.0 * std::exp(a * (1.0 - beta) * std::pow(d, omega) - d / xi);
}

double super_exp_min_threshold(double a, double omega, double beta, double xi) {
  if (!(omega > 1.0)) throw std::invalid_argument("super_exp_min_threshold: need omega > 1");
  return std::max(xi, std::pow(a * xi * omega * (1.0 - beta), -1.0 / (omega - 1.0)));
}

double concave_drift_rate(const RwmhKernel& kernel, const DriftFunction& v, double x) {
  if (!kernel.truncated()) throw std::invalid_argument("concave_drift_rate: needs the truncated kernel");
  auto v_max = v.max_value();
  if (!v_max) throw std::invalid_argument("concave_drift_rate: V must be bounded");
  const double xi = kernel.halfwidth();
  // phi(x): infimum of |V''| over [x - xi, x + xi], endpoints included.
  constexpr int kGrid = 400;
  double phi = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= kGrid; ++k) {
    double y = x - xi + 2.0 * xi * k / kGrid;
    phi = std::min(phi, std::abs(v.second_derivative(y)));
  }
  double kappa_xi = kernel.proposal_density(xi);
  double holding = kernel.time_scale() * std::exp(kernel.log_holding_mean(x));
  return phi * xi * xi * xi * kappa_xi / (3.0 * *v_max * holding);
}

double log_drift_rate(double gamma, double beta, double xi, double d) {
  double gb = gamma * beta;
  return (gb - 1.0) * (gb + 2.0) * xi * xi / (5.0 * (gamma - 1.0) * std::pow(1.0 + d, 2.0 - gamma * (1.0 - beta)));
}

// ---------------------------------------------------------------- ergodicity

ErgodicityVerdict ergodicity_window(double gamma, double beta) {
  if (!(gamma > 1.0)) throw std::invalid_argument("ergodicity_window: need gamma > 1 (normalizable density)");
  ErgodicityVerdict v{gamma, beta, false, std::nullopt};
  double lo = 1.0 / gamma;
  double hi = (gamma - 2.0) / gamma;
  if (lo < hi) v.window = std::make_pair(lo, hi);
  v.uniformly_ergodic = lo < beta && beta < hi;
  return v;
}

// ---------------------------------------------------------------- hitting times

HittingTimeReport hitting_time_moment(const RwmhKernel& kernel, double x0, double d, double alpha,
                                      const HittingTimeOptions& options) {
  if (options.n_rep == 0) throw std::invalid_argument("hitting_time_moment: need n_rep >= 1");
  if (!(d > 0.0)) throw std::invalid_argument("hitting_time_moment: need D > 0");
  const double scale = kernel.time_scale();
  std::vector<double> tau(options.n_rep, 0.0);
  std::vector<char> censored(options.n_rep, 0);
  parallel_for(options.n_rep, options.workers, [&](std::size_t r) {
    if (std::abs(x0) <= d) return;
    ReplicateStreams streams(options.master_seed, r);
    JumpProcess process(kernel, x0, streams);
    while (true) {
      process.draw_holding();
      if (process.jumps() >= options.jump_budget) {
        censored[r] = 1;
        break;
      }
      if (std::abs(process.jump()) <= d) break;
    }
    tau[r] = process.time() * scale;
  });

  HittingTimeReport report{0.0, 0.0, 0.0, 0, options.n_rep};
  std::vector<double> values;
  double tau_sum = 0.0;
  for (std::size_t r = 0; r < options.n_rep; ++r) {
    if (censored[r]) {
      ++report.censored;
      continue;
    }
    values.push_back(alpha == 0.0 ? 1.0 : std::exp(alpha * tau[r]));
    tau_sum += tau[r];
  }
  if (values.empty()) {
    report.moment = std::numeric_limits<double>::infinity();
    return report;
  }
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  report.moment = mean;
  report.stderr_ = values.size() > 1 ? std::sqrt(ss / static_cast<double>(values.size() - 1) / static_cast<double>(values.size())) : 0.0;
  report.mean_tau = tau_sum / static_cast<double>(values.size());
  return report;
}

}  // namespace tempis
