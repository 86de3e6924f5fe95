#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace tempis {

/// One splitmix64 round; used to derive independent stream seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Pseudo-random stream. Each Monte Carlo replicate owns its streams, derived
/// from (master seed, replicate index, channel) so results do not depend on
/// which worker runs the replicate.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed);

  /// Stream for `replicate` on `channel` under `master_seed`.
  static Rng stream(std::uint64_t master_seed, std::uint64_t replicate, std::uint64_t channel = 0);

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform on the open interval (0, 1).
  double uniform_open();
  double normal();
  /// Log of an Exp(1) draw, via inverse CDF.
  double log_standard_exponential();

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// The move and holding-time streams of one replicate. Keeping them separate
/// makes the embedded chain of a jump process identical to the discrete chain
/// simulated from the same seed.
struct ReplicateStreams {
  Rng moves;
  Rng holding;

  ReplicateStreams(std::uint64_t master_seed, std::uint64_t replicate)
      : moves(Rng::stream(master_seed, replicate, 0)), holding(Rng::stream(master_seed, replicate, 1)) {}
};

}  // namespace tempis
