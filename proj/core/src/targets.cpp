#include "tempis/targets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <fmt/core.h>
#include <fmt/ranges.h>

#include "parse_util.hpp"
#include "tempis/numerics.hpp"

namespace tempis {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLogSqrt2Pi = 0.91893853320467274178;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void validate_probabilities(const std::vector<double>& p, bool allow_zero, const char* what) {
  if (p.size() < 2) throw std::invalid_argument(fmt::format("{}: need at least two atoms", what));
  double total = 0.0;
  for (double v : p) {
    if (!std::isfinite(v) || v < 0.0 || (!allow_zero && v == 0.0))
      throw std::invalid_argument(fmt::format("{}: probabilities must be {}", what, allow_zero ? ">= 0" : "> 0"));
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument(fmt::format("{}: probabilities sum to {:.17g}", what, total));
}

}  // namespace

// ---------------------------------------------------------------- Target

Target::Target(TargetKind kind) : kind_(std::move(kind)) {
  log_normalizer_ = std::visit(
      overloaded{
          [](const Gaussian& g) {
            if (!(g.sd > 0.0) || !std::isfinite(g.mean)) throw std::invalid_argument("gaussian: need sd > 0");
            return std::log(g.sd) + kLogSqrt2Pi;
          },
          [](const StudentT& t) {
            if (!(t.dof > 0.0)) throw std::invalid_argument("student_t: need dof > 0");
            return std::lgamma(0.5 * t.dof) + 0.5 * std::log(t.dof * M_PI) - std::lgamma(0.5 * (t.dof + 1.0));
          },
          [](const PolyTail& p) {
            if (!(p.gamma > 1.0)) throw std::invalid_argument("poly_tail: need gamma > 1 for a normalizable density");
            return 0.0;
          },
          [](const SuperExp& s) {
            if (!(s.a > 0.0) || !(s.omega > 0.0)) throw std::invalid_argument("super_exp: need a > 0 and omega > 0");
            // integral of exp(-a|x|^w) = 2 Gamma(1/w) / (w a^(1/w))
            return std::log(2.0) + std::lgamma(1.0 / s.omega) - std::log(s.omega) - std::log(s.a) / s.omega;
          },
          [](const FiniteDiscrete& f) {
            validate_probabilities(f.probabilities, false, "finite");
            return 0.0;
          },
      },
      kind_);
}

Target Target::parse(const std::string& text) {
  auto call = detail::parse_call(text);
  auto need = [&](std::size_t n) {
    if (call.args.size() != n)
      throw std::invalid_argument(fmt::format("target '{}' expects {} argument(s)", call.name, n));
  };
  if (call.name == "gaussian") {
    need(2);
    return gaussian(call.args[0], call.args[1]);
  }
  if (call.name == "student_t") {
    need(1);
    return student_t(call.args[0]);
  }
  if (call.name == "poly_tail") {
    need(1);
    return poly_tail(call.args[0]);
  }
  if (call.name == "super_exp") {
    need(2);
    return super_exp(call.args[0], call.args[1]);
  }
  if (call.name == "finite") return finite(call.args);
  throw std::invalid_argument("unknown target '" + text + "'");
}

std::size_t Target::atom_count() const {
  if (auto* f = std::get_if<FiniteDiscrete>(&kind_)) return f->probabilities.size();
  return 0;
}

std::size_t Target::atom_index(double x) const {
  auto n = atom_count();
  if (x != std::floor(x) || x < 0.0 || x >= static_cast<double>(n))
    throw std::domain_error(fmt::format("state {} is not an atom index of a {}-atom target", x, n));
  return static_cast<std::size_t>(x);
}

double Target::log_density(double x) const {
  if (!std::isfinite(x)) throw std::domain_error("log_density: non-finite state");
  return std::visit(
      overloaded{
          [x](const Gaussian& g) {
            double z = (x - g.mean) / g.sd;
            return -0.5 * z * z;
          },
          [x](const StudentT& t) { return -0.5 * (t.dof + 1.0) * std::log1p(x * x / t.dof); },
          [x](const PolyTail& p) { return std::log(0.5 * (p.gamma - 1.0)) - p.gamma * std::log1p(std::abs(x)); },
          [x](const SuperExp& s) { return -s.a * std::pow(std::abs(x), s.omega); },
          [this, x](const FiniteDiscrete& f) { return std::log(f.probabilities[atom_index(x)]); },
      },
      kind_);
}

std::optional<double> Target::log_normalizer() const { return log_normalizer_; }

double Target::density(double x) const { return std::exp(log_density(x) - log_normalizer_); }

double Target::cdf(double x) const {
  if (std::isnan(x)) throw std::domain_error("cdf: NaN");
  if (x == kInf) return 1.0;
  if (x == -kInf) return 0.0;
  return std::visit(
      overloaded{
          [x](const Gaussian& g) { return numerics::normal_cdf((x - g.mean) / g.sd); },
          [x](const StudentT& t) { return boost::math::cdf(boost::math::students_t_distribution<double>(t.dof), x); },
          [x](const PolyTail& p) {
            double tail = 0.5 * std::pow(1.0 + std::abs(x), -(p.gamma - 1.0));
            return x >= 0.0 ? 1.0 - tail : tail;
          },
          [x](const SuperExp& s) {
            double half = 0.5 * boost::math::gamma_p(1.0 / s.omega, s.a * std::pow(std::abs(x), s.omega));
            return x >= 0.0 ? 0.5 + half : 0.5 - half;
          },
          [x](const FiniteDiscrete& f) {
            if (x < 0.0) return 0.0;
            double acc = 0.0;
            auto top = std::min<double>(std::floor(x), static_cast<double>(f.probabilities.size() - 1));
            for (std::size_t i = 0; static_cast<double>(i) <= top; ++i) acc += f.probabilities[i];
            return std::min(acc, 1.0);
          },
      },
      kind_);
}

std::optional<double> Target::tail_index() const {
  if (auto* p = std::get_if<PolyTail>(&kind_)) return p->gamma;
  if (auto* t = std::get_if<StudentT>(&kind_)) return t->dof + 1.0;
  return std::nullopt;
}

std::vector<double> Target::breakpoints() const {
  if (auto* g = std::get_if<Gaussian>(&kind_)) return {g->mean};
  return {0.0};
}

double Target::expectation(const TestFunction& f) const {
  if (auto* fd = std::get_if<FiniteDiscrete>(&kind_)) {
    double acc = 0.0;
    for (std::size_t i = 0; i < fd->probabilities.size(); ++i) acc += fd->probabilities[i] * f(static_cast<double>(i));
    return acc;
  }
  auto points = breakpoints();
  points.insert(points.end(), f.breakpoints().begin(), f.breakpoints().end());
  auto integrand = [&](double x) {
    double v = f(x);
    return v == 0.0 ? 0.0 : v * density(x);
  };
  return numerics::integrate_real_line(integrand, points).value;
}

double Target::interval_mass(double lo, double hi) const {
  if (!(lo <= hi)) throw std::invalid_argument("interval_mass: need lo <= hi");
  if (auto* fd = std::get_if<FiniteDiscrete>(&kind_)) {
    double acc = 0.0;
    for (std::size_t i = 0; i < fd->probabilities.size(); ++i) {
      double xi = static_cast<double>(i);
      if (xi >= lo && xi <= hi) acc += fd->probabilities[i];
    }
    return acc;
  }
  return cdf(hi) - cdf(lo);
}

std::string Target::describe() const {
  return std::visit(overloaded{
                        [](const Gaussian& g) { return fmt::format("gaussian({},{})", g.mean, g.sd); },
                        [](const StudentT& t) { return fmt::format("student_t({})", t.dof); },
                        [](const PolyTail& p) { return fmt::format("poly_tail({})", p.gamma); },
                        [](const SuperExp& s) { return fmt::format("super_exp({},{})", s.a, s.omega); },
                        [](const FiniteDiscrete& f) { return fmt::format("finite({})", fmt::join(f.probabilities, ",")); },
                    },
                    kind_);
}

// ---------------------------------------------------------------- Trial

Trial::Trial(Target base, TrialKind kind) : base_(std::move(base)), kind_(std::move(kind)) {
  std::visit(
      overloaded{
          [this](const Tempered& t) {
            if (!(t.beta > 0.0 && t.beta <= 1.0)) throw std::invalid_argument("tempered: need 0 < beta <= 1");
            if (auto gamma = base_.tail_index(); gamma && !(t.beta * *gamma > 1.0))
              throw std::invalid_argument(fmt::format(
                  "tempered: beta = {} does not exceed 1/{} so pi^beta is not normalizable", t.beta, *gamma));
            if (base_.is_discrete()) {
              const auto& p = std::get<FiniteDiscrete>(base_.kind()).probabilities;
              finite_q_.resize(p.size());
              double z = 0.0;
              for (std::size_t i = 0; i < p.size(); ++i) z += finite_q_[i] = std::pow(p[i], t.beta);
              for (double& q : finite_q_) q /= z;
            }
          },
          [this](const ExplicitFinite& e) {
            if (!base_.is_discrete()) throw std::invalid_argument("explicit finite trial needs a finite base target");
            validate_probabilities(e.probabilities, true, "explicit trial");
            if (e.probabilities.size() != base_.atom_count())
              throw std::invalid_argument("explicit trial: atom count differs from target");
            finite_q_ = e.probabilities;
          },
          [this](const AtomMixture& m) {
            if (!base_.is_discrete()) throw std::invalid_argument("atom mixture needs a finite base target");
            if (!(m.c > 0.0 && m.c < 1.0)) throw std::invalid_argument("atom mixture: need 0 < c < 1");
            if (m.atom >= base_.atom_count()) throw std::invalid_argument("atom mixture: atom index out of range");
            const auto& p = std::get<FiniteDiscrete>(base_.kind()).probabilities;
            reference_mass_ = p[m.atom];
            finite_q_.resize(p.size());
            for (std::size_t i = 0; i < p.size(); ++i)
              finite_q_[i] = i == m.atom ? m.c : (1.0 - m.c) * p[i] / (1.0 - p[m.atom]);
          },
          [this](const SetMixture& s) {
            if (!(s.c > 0.0 && s.c < 1.0)) throw std::invalid_argument("set mixture: need 0 < c < 1");
            double mass = base_.interval_mass(s.lo, s.hi);
            if (!(mass > 0.0 && mass < 1.0)) throw std::invalid_argument("set mixture: need 0 < Pi(A) < 1");
            reference_mass_ = mass;
            if (base_.is_discrete()) {
              const auto& p = std::get<FiniteDiscrete>(base_.kind()).probabilities;
              finite_q_.resize(p.size());
              for (std::size_t i = 0; i < p.size(); ++i) {
                double xi = static_cast<double>(i);
                bool in = xi >= s.lo && xi <= s.hi;
                finite_q_[i] = in ? s.c * p[i] / mass : (1.0 - s.c) * p[i] / (1.0 - mass);
              }
            }
          },
      },
      kind_);
}

double Trial::log_density(double x) const {
  if (!finite_q_.empty()) {
    if (x != std::floor(x) || x < 0.0 || x >= static_cast<double>(finite_q_.size()))
      throw std::domain_error(fmt::format("state {} is not an atom index", x));
    return std::log(finite_q_[static_cast<std::size_t>(x)]);
  }
  return std::visit(overloaded{
                        [&](const Tempered& t) { return t.beta * base_.log_density(x); },
                        [&](const SetMixture& s) {
                          double log_pi = base_.log_density(x) - *base_.log_normalizer();
                          double mass = *reference_mass_;
                          bool in = x >= s.lo && x <= s.hi;
                          return in ? std::log(s.c) + log_pi - std::log(mass)
                                    : std::log1p(-s.c) + log_pi - std::log1p(-mass);
                        },
                        [](const auto&) -> double { throw std::logic_error("finite trial without atom table"); },
                    },
                    kind_);
}

double Trial::log_normalizer() const {
  if (!finite_q_.empty()) return 0.0;
  if (const auto* t = std::get_if<Tempered>(&kind_)) {
    if (t->beta == 1.0) return *base_.log_normalizer();
    // shift by the density at the mode-ish breakpoint to keep exp() in range
    double shift = t->beta * base_.log_density(base_.breakpoints().front());
    auto integrand = [&](double x) { return std::exp(t->beta * base_.log_density(x) - shift); };
    auto result = numerics::integrate_real_line(integrand, base_.breakpoints());
    if (result.divergent) return std::numeric_limits<double>::infinity();
    return std::log(result.value) + shift;
  }
  return 0.0;  // SetMixture is normalized by construction
}

bool Trial::samplable() const {
  if (!finite_q_.empty()) return true;
  return std::holds_alternative<Tempered>(kind_) && std::holds_alternative<Gaussian>(base_.kind());
}

double Trial::sample(Rng& rng) const {
  if (!finite_q_.empty()) {
    double u = rng.uniform_open();
    double acc = 0.0;
    for (std::size_t i = 0; i < finite_q_.size(); ++i) {
      acc += finite_q_[i];
      if (u < acc) return static_cast<double>(i);
    }
    for (std::size_t i = finite_q_.size(); i-- > 0;)
      if (finite_q_[i] > 0.0) return static_cast<double>(i);
  }
  if (samplable()) {
    const auto& g = std::get<Gaussian>(base_.kind());
    double beta = std::get<Tempered>(kind_).beta;
    return g.mean + g.sd / std::sqrt(beta) * rng.normal();
  }
  throw std::logic_error("trial " + describe() + " has no exact sampler");
}

std::string Trial::describe() const {
  return std::visit(overloaded{
                        [](const Tempered& t) { return fmt::format("tempered({})", t.beta); },
                        [](const ExplicitFinite& e) { return fmt::format("explicit({})", fmt::join(e.probabilities, ",")); },
                        [](const AtomMixture& m) { return fmt::format("atom_mixture({},{})", m.atom, m.c); },
                        [](const SetMixture& s) { return fmt::format("set_mixture({},{},{})", s.lo, s.hi, s.c); },
                    },
                    kind_);
}

// ---------------------------------------------------------------- WeightFunction

WeightFunction::WeightFunction(Target target, Trial trial) : target_(std::move(target)), trial_(std::move(trial)) {}

double WeightFunction::log_weight(double x) const {
  double lw = target_.log_density(x) - trial_.log_density(x);
  if (std::isnan(lw)) lw = kInf;  // -inf - (-inf) cannot happen for pi > 0; guard anyway
  return log_constant_ ? lw + *log_constant_ : lw;
}

double WeightFunction::weight(double x) const { return std::exp(log_weight(x)); }

WeightFunction WeightFunction::exact() const {
  if (mode_ == Normalization::Exact) return *this;
  WeightFunction out = *this;
  out.mode_ = Normalization::Exact;
  out.log_constant_ = trial_.log_normalizer() - *target_.log_normalizer();
  return out;
}

WeightFunction weight(const Trial& trial, const Target& target) { return WeightFunction(target, trial); }

}  // namespace tempis
