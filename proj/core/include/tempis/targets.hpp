#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tempis/functions.hpp"
#include "tempis/rng.hpp"

namespace tempis {

// Target families. Continuous targets live on the real line; FiniteDiscrete
// lives on the atom indices 0..N-1 (a state x is read as an index).
struct Gaussian {
  double mean = 0.0;
  double sd = 1.0;
};
struct StudentT {
  double dof = 4.0;
};
/// pi(x) = (gamma - 1)/2 * (1 + |x|)^(-gamma), normalized.
struct PolyTail {
  double gamma = 5.0;
};
/// pi(x) proportional to exp(-a |x|^omega).
struct SuperExp {
  double a = 1.0;
  double omega = 2.0;
};
struct FiniteDiscrete {
  std::vector<double> probabilities;
};

using TargetKind = std::variant<Gaussian, StudentT, PolyTail, SuperExp, FiniteDiscrete>;

/// Target distribution Pi, handled through its unnormalized log density.
/// Immutable after construction.
class Target {
 public:
  explicit Target(TargetKind kind);

  static Target gaussian(double mean = 0.0, double sd = 1.0) { return Target(Gaussian{mean, sd}); }
  static Target student_t(double dof) { return Target(StudentT{dof}); }
  static Target poly_tail(double gamma) { return Target(PolyTail{gamma}); }
  static Target super_exp(double a, double omega) { return Target(SuperExp{a, omega}); }
  static Target finite(std::vector<double> probabilities) { return Target(FiniteDiscrete{std::move(probabilities)}); }

  /// Parses "gaussian(m,s)", "student_t(nu)", "poly_tail(g)", "super_exp(a,w)", "finite(p1,...,pN)".
  static Target parse(const std::string& text);

  const TargetKind& kind() const { return kind_; }
  bool is_discrete() const { return std::holds_alternative<FiniteDiscrete>(kind_); }
  std::size_t atom_count() const;

  /// Log of the unnormalized density (log atom mass for FiniteDiscrete).
  /// Throws std::domain_error for non-finite x or a non-atom state.
  double log_density(double x) const;
  /// log of the integral of exp(log_density); every built-in family knows it.
  std::optional<double> log_normalizer() const;
  /// exp(log_density - log_normalizer).
  double density(double x) const;
  double cdf(double x) const;

  /// Polynomial tail exponent of the density, if it has one (gamma, or nu + 1).
  std::optional<double> tail_index() const;
  /// Points where quadrature should split (mode, kinks).
  std::vector<double> breakpoints() const;
  /// Pi(f), by quadrature or exact summation. +/-inf if divergent.
  double expectation(const TestFunction& f) const;
  /// Probability of the closed interval [lo, hi].
  double interval_mass(double lo, double hi) const;

  std::string describe() const;

 private:
  std::size_t atom_index(double x) const;

  TargetKind kind_;
  double log_normalizer_ = 0.0;
};

struct Tempered {
  double beta = 1.0;
};
struct ExplicitFinite {
  std::vector<double> probabilities;
};
/// Mass c on atom x_star, remaining 1 - c spread proportionally to pi elsewhere.
struct AtomMixture {
  std::size_t atom = 0;
  double c = 0.5;
};
/// q = c pi / Pi(A) on A = [lo, hi] and (1 - c) pi / (1 - Pi(A)) off A.
struct SetMixture {
  double lo = -1.0;
  double hi = 1.0;
  double c = 0.5;
};

using TrialKind = std::variant<Tempered, ExplicitFinite, AtomMixture, SetMixture>;

/// Trial distribution Q built on top of a base target.
class Trial {
 public:
  Trial(Target base, TrialKind kind);

  const Target& base() const { return base_; }
  const TrialKind& kind() const { return kind_; }

  /// Unnormalized log q. -inf where q vanishes.
  double log_density(double x) const;
  /// log of the integral of exp(log_density). Quadrature for tempered continuous trials.
  double log_normalizer() const;
  /// Pi(A) for SetMixture, Pi({x_star}) for AtomMixture.
  std::optional<double> reference_mass() const { return reference_mass_; }

  bool samplable() const;
  /// Exact draw from Q (tempered Gaussian or finite trials only).
  double sample(Rng& rng) const;

  std::string describe() const;

 private:
  Target base_;
  TrialKind kind_;
  std::optional<double> reference_mass_;
  std::vector<double> finite_q_;  // normalized q on atoms, when the trial is finite
};

enum class Normalization { SelfNormalized, Exact };

/// Importance weight w = pi / q in log space.
class WeightFunction {
 public:
  WeightFunction(Target target, Trial trial);

  /// log pi - log q with unnormalized densities (plus the exact constant in Exact mode).
  double log_weight(double x) const;
  double weight(double x) const;
  Normalization mode() const { return mode_; }
  /// log(Z_q / Z_pi) once normalized.
  std::optional<double> log_constant() const { return log_constant_; }
  /// Copy with the normalizing constant computed, so that weight = dPi/dQ exactly.
  WeightFunction exact() const;

  const Target& target() const { return target_; }
  const Trial& trial() const { return trial_; }

 private:
  Target target_;
  Trial trial_;
  Normalization mode_ = Normalization::SelfNormalized;
  std::optional<double> log_constant_;
};

WeightFunction weight(const Trial& trial, const Target& target);

}  // namespace tempis
