#include "tempis/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace tempis::numerics {

namespace {

double integrate_piece(const RealFunction& f, double a, double b, double tolerance) {
  if (a == b) return 0.0;
  // tanh-sinh copes with endpoint singularities; it throws when the integrand
  // blows up too close to an endpoint, in which case Gauss-Kronrod is used.
  static thread_local boost::math::quadrature::tanh_sinh<double> ts(12);
  try {
    double err = 0.0;
    double value = ts.integrate(f, a, b, tolerance, &err);
    if (std::isfinite(value)) return value;
  } catch (const std::exception&) {
  }
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 25, tolerance, &err);
}

}  // namespace

std::vector<double> interior_points(std::span<const double> points, double a, double b) {
  std::vector<double> out;
  for (double p : points)
    if (p > a && p < b) out.push_back(p);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double integrate(const RealFunction& f, double a, double b, std::span<const double> breakpoints,
                 double tolerance) {
  if (!(std::isfinite(a) && std::isfinite(b))) throw std::invalid_argument("integrate: non-finite limits");
  if (a > b) return -integrate(f, b, a, breakpoints, tolerance);
  auto cuts = interior_points(breakpoints, a, b);
  double total = 0.0;
  double left = a;
  for (double c : cuts) {
    total += integrate_piece(f, left, c, tolerance);
    left = c;
  }
  total += integrate_piece(f, left, b, tolerance);
  return total;
}

LineIntegral integrate_real_line(const RealFunction& f, std::span<const double> breakpoints,
                                 double relative_tolerance, double max_half_width) {
  double reach = 0.0;
  for (double p : breakpoints) reach = std::max(reach, std::abs(p));
  double L = std::max(8.0, 2.0 * reach);

  auto abs_f = [&f](double x) { return std::abs(f(x)); };
  LineIntegral out;
  out.value = integrate(f, -L, L, breakpoints);
  double magnitude = integrate(abs_f, -L, L, breakpoints);

  // Shells [L, 2L] of a power-law tail shrink by a constant ratio r. Once r
  // settles below 1 the rest of the tail is integrated after x = L/u, which
  // turns |x| > L into u in (0, 1] with an integrable endpoint singularity.
  auto tail_beyond = [&f](double L) {
    auto right = [&f, L](double u) { return L / u < 1e100 ? f(L / u) * L / (u * u) : 0.0; };
    auto left = [&f, L](double u) { return L / u < 1e100 ? f(-L / u) * L / (u * u) : 0.0; };
    return integrate(right, 0.0, 1.0) + integrate(left, 0.0, 1.0);
  };
  double prev_abs = -1.0, prev_ratio = -1.0;
  while (true) {
    double shell = integrate(f, L, 2 * L, breakpoints) + integrate(f, -2 * L, -L, breakpoints);
    double shell_abs = integrate(abs_f, L, 2 * L, breakpoints) + integrate(abs_f, -2 * L, -L, breakpoints);
    out.value += shell;
    magnitude += shell_abs;
    L *= 2;
    out.half_width = L;
    if (!std::isfinite(out.value) || !std::isfinite(magnitude)) {
      out.divergent = true;
      out.value = std::numeric_limits<double>::infinity();
      return out;
    }
    if (shell_abs <= relative_tolerance * magnitude) return out;
    if (prev_abs > 0.0) {
      double ratio = shell_abs / prev_abs;
      if (prev_ratio > 0.0 && std::abs(ratio - prev_ratio) <= 1e-3 * ratio) {
        if (ratio >= 1.0 - 1e-3) {
          out.divergent = true;
          out.value = out.value < 0 ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
          return out;
        }
        double tail;
        try {
          tail = tail_beyond(L);
        } catch (const std::exception&) {
          tail = std::numeric_limits<double>::quiet_NaN();
        }
        out.value += std::isfinite(tail) ? tail : shell * ratio / (1.0 - ratio);
        return out;
      }
      prev_ratio = ratio;
    }
    prev_abs = shell_abs;
    if (L > max_half_width) {
      out.divergent = true;
      out.value = out.value < 0 ? -std::numeric_limits<double>::infinity()
                                : std::numeric_limits<double>::infinity();
      return out;
    }
  }
}

double log_sum_exp(std::span<const double> values) {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : values) m = std::max(m, v);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double v : values) s += std::exp(v - m);
  return m + std::log(s);
}

double bisect_increasing(const RealFunction& g, double lo, double hi, double relative_tolerance,
                         int max_iterations) {
  if (!(lo < hi)) throw std::invalid_argument("bisect_increasing: empty bracket");
  for (int it = 0; it < max_iterations; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (g(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= relative_tolerance * std::max(std::abs(lo), std::abs(hi))) break;
  }
  return 0.5 * (lo + hi);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace tempis::numerics
