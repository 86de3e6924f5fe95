#include "tempis/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <fmt/core.h>
#include <fmt/ostream.h>

#include "tempis/numerics.hpp"

namespace tempis {

namespace {
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
}

RwmhKernel::RwmhKernel(Target target, double beta, double proposal_sd, bool truncated,
                       std::optional<double> truncation_halfwidth)
    : target_(std::move(target)),
      beta_(beta),
      proposal_sd_(proposal_sd),
      truncated_(truncated),
      halfwidth_(truncation_halfwidth.value_or(proposal_sd)) {
  if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("rwmh kernel: need 0 < beta <= 1");
  if (!(proposal_sd > 0.0)) throw std::invalid_argument("rwmh kernel: need proposal_sd > 0");
  if (truncated && !(halfwidth_ > 0.0)) throw std::invalid_argument("rwmh kernel: need truncation halfwidth > 0");
  if (target_.is_discrete()) throw std::invalid_argument("rwmh kernel: target must be continuous");
  if (auto gamma = target_.tail_index(); gamma && !(beta * *gamma > 1.0))
    throw std::invalid_argument(fmt::format("rwmh kernel: pi^beta is not normalizable for beta = {}", beta));
  if (truncated_) {
    double u = halfwidth_ / proposal_sd_;
    truncated_mass_ = numerics::normal_cdf(u) - numerics::normal_cdf(-u);
  }
}

double RwmhKernel::propose(double x, Rng& rng) const {
  double z = proposal_sd_ * rng.normal();
  if (truncated_)
    while (std::abs(z) > halfwidth_) z = proposal_sd_ * rng.normal();
  return x + z;
}

double RwmhKernel::acceptance_probability(double x, double y) const {
  double log_ratio = beta_ * (target_.log_density(y) - target_.log_density(x));
  return log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
}

double RwmhKernel::proposal_density(double z) const {
  if (truncated_ && std::abs(z) > halfwidth_) return 0.0;
  double u = z / proposal_sd_;
  return kInvSqrt2Pi * std::exp(-0.5 * u * u) / (proposal_sd_ * truncated_mass_);
}

double RwmhKernel::proposal_reach() const {
  return truncated_ ? halfwidth_ : std::numeric_limits<double>::infinity();
}

RwmhKernel::Step RwmhKernel::step(double x, Rng& rng) const {
  double y = propose(x, rng);
  double log_ratio = beta_ * (target_.log_density(y) - target_.log_density(x));
  // The uniform is drawn even for sure acceptances so each step consumes a
  // fixed number of uniforms after the proposal.
  double log_u = std::log(rng.uniform_open());
  if (log_ratio >= 0.0 || log_u < log_ratio) return {y, true};
  return {x, false};
}

double RwmhKernel::time_scale() const {
  // Z_beta / Z with Z_beta the integral of the unnormalized pi^beta.
  Trial tempered(target_, Tempered{beta_});
  return std::exp(tempered.log_normalizer() - *target_.log_normalizer());
}

std::vector<double> simulate_jump_chain(const RwmhKernel& kernel, double x0, std::size_t n, Rng& moves) {
  if (n == 0) throw std::invalid_argument("simulate_jump_chain: need n >= 1");
  std::vector<double> chain;
  chain.reserve(n);
  double x = x0;
  for (std::size_t i = 0; i < n; ++i) {
    x = kernel.step(x, moves).next;
    chain.push_back(x);
  }
  return chain;
}

double JumpPath::end_time() const {
  if (states.empty()) return 0.0;
  return jump_times.back() + holding_times.back();
}

JumpProcess::JumpProcess(const RwmhKernel& kernel, double x0, ReplicateStreams& streams)
    : kernel_(&kernel), streams_(&streams), state_(x0) {
  if (!std::isfinite(x0)) throw std::invalid_argument("jump process: non-finite initial state");
}

double JumpProcess::draw_holding() {
  double log_w = kernel_->log_holding_mean(state_) + streams_->holding.log_standard_exponential();
  double w;
  if (log_w > std::log(std::numeric_limits<double>::max())) {
    w = std::numeric_limits<double>::max();
    clamped_ = true;
  } else {
    w = std::exp(log_w);
  }
  if (!(w > 0.0)) w = std::numeric_limits<double>::denorm_min();
  time_ += w;
  return w;
}

double JumpProcess::jump() {
  state_ = kernel_->step(state_, streams_->moves).next;
  ++jumps_;
  return state_;
}

JumpPath simulate_ctmc(const RwmhKernel& kernel, double x0, const Horizon& horizon, ReplicateStreams& streams) {
  if (horizon.n_jumps.has_value() == horizon.t_max.has_value())
    throw std::invalid_argument("simulate_ctmc: give exactly one of n_jumps or t_max");
  if (horizon.n_jumps && *horizon.n_jumps == 0) throw std::invalid_argument("simulate_ctmc: need n_jumps >= 1");
  if (horizon.t_max && !(*horizon.t_max > 0.0)) throw std::invalid_argument("simulate_ctmc: need t_max > 0");

  JumpPath path;
  path.seed = streams.moves.seed();
  JumpProcess process(kernel, x0, streams);
  while (true) {
    double t = process.time();
    double x = process.state();
    double w = process.draw_holding();
    path.states.push_back(x);
    path.jump_times.push_back(t);
    path.holding_times.push_back(w);
    if (horizon.n_jumps && path.size() == *horizon.n_jumps) break;
    if (horizon.t_max && process.time() > *horizon.t_max) break;
    process.jump();
  }
  path.clamped = process.clamped();
  return path;
}

double state_at(const JumpPath& path, double t) {
  if (path.states.empty()) throw std::invalid_argument("state_at: empty path");
  if (!(t >= 0.0) || t >= path.end_time())
    throw std::out_of_range(fmt::format("state_at: t = {} outside [0, {})", t, path.end_time()));
  auto it = std::upper_bound(path.jump_times.begin(), path.jump_times.end(), t);
  return path.states[static_cast<std::size_t>(it - path.jump_times.begin()) - 1];
}

EstimateRecord snis_beta(std::span<const double> chain, const Target& target, double beta, const TestFunction& f) {
  if (chain.empty()) throw std::invalid_argument("snis_beta: empty chain");
  std::vector<double> lw(chain.size());
  for (std::size_t i = 0; i < chain.size(); ++i) lw[i] = beta == 1.0 ? 0.0 : (1.0 - beta) * target.log_density(chain[i]);
  return snis_from_log_weights(chain, lw, f);
}

void write_path_csv(std::ostream& out, const JumpPath& path) {
  out << "k,X_k,W_k,T_k\n";
  for (std::size_t k = 0; k < path.size(); ++k)
    fmt::print(out, "{},{:.17g},{:.17g},{:.17g}\n", k + 1, path.states[k], path.holding_times[k], path.jump_times[k]);
}

void write_chain_csv(std::ostream& out, std::span<const double> chain, const Target& target, double beta) {
  out << "i,X_i,log_weight_unnorm\n";
  for (std::size_t i = 0; i < chain.size(); ++i)
    fmt::print(out, "{},{:.17g},{:.17g}\n", i + 1, chain[i], (1.0 - beta) * target.log_density(chain[i]));
}

}  // namespace tempis
