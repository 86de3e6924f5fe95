#include <doctest.h>

#include <cmath>
#include <set>

#include "tempis/rng.hpp"

using namespace tempis;

TEST_CASE("splitmix64 reference values") {
  // first outputs of the splitmix64 generator seeded with 0
  std::uint64_t state = 0;
  CHECK(splitmix64(state) == 0xe220a8397b1dcdafULL);
  state += 0x9e3779b97f4a7c15ULL;
  CHECK(splitmix64(state) == 0x6e789e6aa1b965f4ULL);
}

TEST_CASE("streams are reproducible and distinct") {
  auto a = Rng::stream(42, 3, 0), b = Rng::stream(42, 3, 0);
  for (int i = 0; i < 100; ++i) CHECK(a() == b());
  std::set<std::uint64_t> firsts;
  for (std::uint64_t m : {1, 2})
    for (std::uint64_t r = 0; r < 50; ++r)
      for (std::uint64_t c = 0; c < 3; ++c) firsts.insert(Rng::stream(m, r, c)());
  CHECK(firsts.size() == 300);
}

TEST_CASE("replicate streams split moves and holding") {
  ReplicateStreams s(9, 4);
  CHECK(s.moves.seed() == Rng::stream(9, 4, 0).seed());
  CHECK(s.holding.seed() == Rng::stream(9, 4, 1).seed());
}

TEST_CASE("uniform_open stays inside (0,1) with the right moments") {
  Rng r(5);
  const int n = 200000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    double u = r.uniform_open();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    s += u;
    s2 += u * u;
  }
  CHECK(std::abs(s / n - 0.5) < 3 * std::sqrt(1.0 / 12 / n));
  CHECK(std::abs(s2 / n - 1.0 / 3) < 3 * std::sqrt(4.0 / 45 / n));
}

TEST_CASE("log_standard_exponential is the log of an Exp(1) draw") {
  Rng r(6);
  const int n = 200000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    double e = std::exp(r.log_standard_exponential());
    s += e;
    s2 += e * e;
  }
  CHECK(std::abs(s / n - 1.0) < 3 * std::sqrt(1.0 / n));
  CHECK(std::abs(s2 / n - 2.0) < 3 * std::sqrt(20.0 / n));
}
