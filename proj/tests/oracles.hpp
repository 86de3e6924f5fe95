#pragma once

// Independent reference computations used to check the library.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

#include "tempis/sampler.hpp"

namespace oracle {

/// Composite Simpson rule with m (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int m = 20000) {
  if (m % 2) ++m;
  const double h = (b - a) / m;
  double s = f(a) + f(b);
  for (int i = 1; i < m; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

/// Largest eigenvalue of a symmetric matrix by cyclic Jacobi rotations.
inline double max_eigenvalue(std::vector<std::vector<double>> a) {
  const std::size_t n = a.size();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
  }
  double m = a[0][0];
  for (std::size_t i = 1; i < n; ++i) m = std::max(m, a[i][i]);
  return m;
}

/// sup of Pi(f^2 w) over mean-zero, unit-variance f on the atoms. With g = sqrt(pi) f
/// the constraint set is the unit sphere orthogonal to sqrt(pi); an orthonormal basis
/// of that complement comes from Gram-Schmidt and the sup is the top eigenvalue of
/// the projected diag(w).
inline double brute_force_risk(const std::vector<double>& pi, const std::vector<double>& q) {
  const std::size_t n = pi.size();
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = pi[i] / q[i];
  std::vector<std::vector<double>> basis;
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = std::sqrt(pi[i]);
  basis.push_back(u);
  for (std::size_t e = 0; e < n && basis.size() < n; ++e) {
    std::vector<double> v(n, 0.0);
    v[e] = 1.0;
    for (const auto& b : basis) {
      double dot = 0.0;
      for (std::size_t i = 0; i < n; ++i) dot += v[i] * b[i];
      for (std::size_t i = 0; i < n; ++i) v[i] -= dot * b[i];
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm < 1e-8) continue;
    for (double& x : v) x /= norm;
    basis.push_back(v);
  }
  const std::size_t k = basis.size() - 1;
  std::vector<std::vector<double>> m(k, std::vector<double>(k, 0.0));
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b)
      for (std::size_t i = 0; i < n; ++i) m[a][b] += basis[a + 1][i] * w[i] * basis[b + 1][i];
  return max_eigenvalue(m);
}

/// Random probability vector with all entries at least `floor`.
inline std::vector<double> random_simplex(std::mt19937_64& gen, std::size_t n, double floor = 1e-3) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> p(n);
  double s = 0.0;
  for (auto& x : p) s += x = e(gen) + floor;
  for (auto& x : p) x /= s;
  return p;
}

/// Y_t by scanning the intervals one by one.
inline double state_at_linear(const tempis::JumpPath& path, double t) {
  for (std::size_t k = 0; k < path.size(); ++k)
    if (t >= path.jump_times[k] && t < path.jump_times[k] + path.holding_times[k]) return path.states[k];
  throw std::out_of_range("t outside path");
}

}  // namespace oracle
