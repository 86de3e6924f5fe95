#pragma once

#include <functional>
#include <span>
#include <vector>

namespace tempis::numerics {

using RealFunction = std::function<double(double)>;

/// Definite integral over a finite interval by double-exponential quadrature.
/// Integrable endpoint singularities (e.g. log|x| at 0) are handled as long as
/// they sit on an endpoint; interior kinks and jumps should be split out by the
/// caller through `breakpoints`.
double integrate(const RealFunction& f, double a, double b,
                 std::span<const double> breakpoints = {}, double tolerance = 1e-12);

struct LineIntegral {
  double value = 0.0;
  bool divergent = false;
  double half_width = 0.0;  ///< L of the final [-L, L] window
};

/// Integral over the whole real line on expanding windows [-L, L]. L doubles
/// until the shell contribution of |f| drops below `relative_tolerance` of the
/// running integral of |f|. Power-law tails, whose shells shrink by a settled
/// ratio r < 1, are finished by integrating |x| > L after the substitution
/// x = L/u; a settled r >= 1 means divergence. Past `max_half_width` the integral is declared divergent and `value`
/// is +inf (or the sign of the last partial sum).
LineIntegral integrate_real_line(const RealFunction& f,
                                 std::span<const double> breakpoints = {},
                                 double relative_tolerance = 1e-10,
                                 double max_half_width = 1e6);

/// log(sum(exp(v))) with the max shifted out; -inf for an empty or all -inf input.
double log_sum_exp(std::span<const double> values);

/// Root of a continuous increasing function on (lo, hi) with g(lo) < 0 < g(hi),
/// by bisection down to a relative bracket width of `relative_tolerance`.
double bisect_increasing(const RealFunction& g, double lo, double hi,
                         double relative_tolerance = 1e-12, int max_iterations = 400);

/// Standard normal CDF.
double normal_cdf(double z);

/// Sorted, de-duplicated copy of `points` restricted to the open interval (a, b).
std::vector<double> interior_points(std::span<const double> points, double a, double b);

}  // namespace tempis::numerics
