#include "tempis/rng.hpp"

#include <cmath>

namespace tempis {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed) : seed_(seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(splitmix64(seed)),
                    static_cast<std::uint32_t>(splitmix64(seed) >> 32)};
  engine_.seed(seq);
}

Rng Rng::stream(std::uint64_t master_seed, std::uint64_t replicate, std::uint64_t channel) {
  std::uint64_t s = splitmix64(master_seed);
  s = splitmix64(s ^ splitmix64(replicate + 0x632be59bd9b4e019ULL));
  s = splitmix64(s ^ splitmix64(channel + 0x8cb92ba72f3d8dd7ULL));
  return Rng(s);
}

double Rng::uniform_open() {
  // 53 random bits, offset by half a step so that 0 and 1 are never returned.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::normal() { return normal_(engine_); }

double Rng::log_standard_exponential() { return std::log(-std::log(uniform_open())); }

}  // namespace tempis
