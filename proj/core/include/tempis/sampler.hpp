#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "tempis/estimators.hpp"
#include "tempis/rng.hpp"
#include "tempis/targets.hpp"

namespace tempis {

/// Random-walk Metropolis-Hastings kernel reversible w.r.t. q proportional to pi^beta.
///
/// The proposal increment is N(0, proposal_sd^2), optionally truncated to
/// [-halfwidth, halfwidth] (halfwidth defaults to proposal_sd, which is the
/// truncated kernel used by the drift analysis).
class RwmhKernel {
 public:
  RwmhKernel(Target target, double beta, double proposal_sd, bool truncated = false,
             std::optional<double> truncation_halfwidth = std::nullopt);

  const Target& target() const { return target_; }
  double beta() const { return beta_; }
  double proposal_sd() const { return proposal_sd_; }
  bool truncated() const { return truncated_; }
  double halfwidth() const { return halfwidth_; }

  double propose(double x, Rng& rng) const;

  struct Step {
    double next;
    bool accepted;
  };
  Step step(double x, Rng& rng) const;

  /// min(1, (pi(y)/pi(x))^beta).
  double acceptance_probability(double x, double y) const;
  /// Normalized proposal increment density kappa(z).
  double proposal_density(double z) const;
  /// Largest |z| the proposal reaches (halfwidth, or +inf when untruncated).
  double proposal_reach() const;

  /// log of the unnormalized importance weight pi(x)^(1-beta), the mean holding
  /// time at x in the simulation's time unit.
  double log_holding_mean(double x) const { return (1.0 - beta_) * target_.log_density(x); }

  /// Factor converting simulated time to the generator's normalized time:
  /// Z_beta * pi_normalized(x)^(1-beta) = time_scale() * pi_unnormalized(x)^(1-beta).
  /// Computed by quadrature.
  double time_scale() const;

 private:
  Target target_;
  double beta_;
  double proposal_sd_;
  bool truncated_;
  double halfwidth_;
  double truncated_mass_ = 1.0;  // P(|Z| <= halfwidth) for Z ~ N(0, sd^2)
};

/// n states of the embedded chain after x0 (rejections repeat the state).
std::vector<double> simulate_jump_chain(const RwmhKernel& kernel, double x0, std::size_t n, Rng& moves);

/// Continuous-time trajectory: state X_k held for W_k starting at T_k, with T_1 = 0.
struct JumpPath {
  std::vector<double> states;
  std::vector<double> holding_times;
  std::vector<double> jump_times;
  std::uint64_t seed = 0;
  /// A holding time overflowed and was clamped to the largest finite double.
  bool clamped = false;

  std::size_t size() const { return states.size(); }
  /// T_k + W_k of the last state.
  double end_time() const;
};

/// Either a number of holding intervals or a time horizon.
struct Horizon {
  std::optional<std::size_t> n_jumps;
  std::optional<double> t_max;

  static Horizon jumps(std::size_t n) { return {n, std::nullopt}; }
  static Horizon until(double t) { return {std::nullopt, t}; }
};

/// Step-at-a-time jump process. Each advance() draws the holding time at the
/// current state from the holding stream and the next state from the move
/// stream.
class JumpProcess {
 public:
  JumpProcess(const RwmhKernel& kernel, double x0, ReplicateStreams& streams);

  double state() const { return state_; }
  double time() const { return time_; }
  std::size_t jumps() const { return jumps_; }
  bool clamped() const { return clamped_; }

  /// Samples the holding time at the current state; returns it.
  double draw_holding();
  /// Moves to the next state of the embedded chain; returns it.
  double jump();

 private:
  const RwmhKernel* kernel_;
  ReplicateStreams* streams_;
  double state_;
  double time_ = 0.0;
  std::size_t jumps_ = 0;
  bool clamped_ = false;
};

/// Jump-process trajectory started at x0 (X_1 = x0, T_1 = 0). With a jump
/// horizon the path has exactly n states; with a time horizon it stops at the
/// state whose holding interval covers t_max.
JumpPath simulate_ctmc(const RwmhKernel& kernel, double x0, const Horizon& horizon, ReplicateStreams& streams);

/// Y_t: the state whose interval [T_k, T_k + W_k) contains t.
double state_at(const JumpPath& path, double t);

/// sum f(X_i) pi(X_i)^(1-beta) / sum pi(X_i)^(1-beta) over a chain.
EstimateRecord snis_beta(std::span<const double> chain, const Target& target, double beta, const TestFunction& f);

/// CSV with header k,X_k,W_k,T_k.
void write_path_csv(std::ostream& out, const JumpPath& path);
/// CSV with header i,X_i,log_weight_unnorm for weights pi^(1-beta).
void write_chain_csv(std::ostream& out, std::span<const double> chain, const Target& target, double beta);

}  // namespace tempis
