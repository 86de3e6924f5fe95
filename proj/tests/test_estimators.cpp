#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "tempis/estimators.hpp"
#include "tempis/sampler.hpp"

using namespace tempis;

namespace {

std::vector<double> finite_q(const Trial& t, std::size_t n) {
  std::vector<double> q(n);
  for (std::size_t i = 0; i < n; ++i) q[i] = std::exp(t.log_density(static_cast<double>(i)));
  double s = std::accumulate(q.begin(), q.end(), 0.0);
  for (auto& v : q) v /= s;
  return q;
}

}  // namespace

TEST_CASE("plain_is examples") {
  auto g = Target::gaussian();
  auto unit = weight(Trial(g, Tempered{1.0}), g).exact();
  std::vector<double> s{1.0, 2.0, 3.0};
  CHECK(plain_is(s, TestFunction::identity(), unit).value == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(plain_is(s, TestFunction::constant(4.0), unit).value == doctest::Approx(4.0).epsilon(1e-15));

  auto pi = Target::finite({0.7, 0.3});
  auto w = weight(Trial(pi, ExplicitFinite{{0.5, 0.5}}), pi).exact();
  std::vector<double> atoms{0.0, 1.0};
  auto e = plain_is(atoms, TestFunction::indicator(-0.5, 0.5), w);
  CHECK(e.value == doctest::Approx((1.4 + 0.0) / 2.0).epsilon(1e-15));
  CHECK(e.kind == EstimatorKind::Plain);
  // with non-unit weights, f = c gives c times the mean weight
  CHECK(plain_is(atoms, TestFunction::constant(3.0), w).value == doctest::Approx(3.0 * (1.4 + 0.6) / 2.0));
}

TEST_CASE("plain_is needs exact weights") {
  auto g = Target::gaussian();
  std::vector<double> s{0.0};
  CHECK_THROWS_AS(plain_is(s, TestFunction::identity(), weight(Trial(g, Tempered{0.5}), g)), std::invalid_argument);
}

TEST_CASE("snis examples") {
  std::vector<double> s{0.0, 1.0};
  std::vector<double> lw{std::log(1.0), std::log(3.0)};
  CHECK(snis_from_log_weights(s, lw, TestFunction::identity()).value == doctest::Approx(0.75).epsilon(1e-15));

  std::vector<double> xs{1.0, 4.0, 7.0};
  std::vector<double> equal(3, -2.5);
  CHECK(snis_from_log_weights(xs, equal, TestFunction::identity()).value == doctest::Approx(4.0).epsilon(1e-15));

  std::vector<double> one{2.5};
  std::vector<double> lw1{-700.0};
  CHECK(snis_from_log_weights(one, lw1, TestFunction::power(2)).value == 6.25);
}

TEST_CASE("snis degenerate and infinite weights") {
  std::vector<double> s{1.0, 2.0};
  std::vector<double> none{-INFINITY, -INFINITY};
  auto e = snis_from_log_weights(s, none, TestFunction::identity());
  CHECK(e.degenerate);
  CHECK(e.value == 0.0);
  std::vector<double> inf{INFINITY, 0.0};
  CHECK(snis_from_log_weights(s, inf, TestFunction::identity()).value == 1.0);
  CHECK_THROWS(snis_from_log_weights(std::vector<double>{}, std::vector<double>{}, TestFunction::identity()));
}

TEST_CASE("snis survives weights that underflow in linear space") {
  auto g = Target::gaussian();
  auto w = weight(Trial(g, Tempered{0.7}), g);
  std::vector<double> far{40.0, 41.0};  // pi(x)^0.3 underflows far below 1e-300
  auto e = snis(far, TestFunction::identity(), w);
  CHECK_FALSE(e.degenerate);
  double r = std::exp(-0.15 * (41.0 * 41.0 - 40.0 * 40.0));
  CHECK(e.value == doctest::Approx((40.0 + 41.0 * r) / (1.0 + r)).epsilon(1e-14));
}

TEST_CASE("snis is invariant to additive log-weight constants") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> xs(50), lw(50), shifted(50);
    for (int i = 0; i < 50; ++i) {
      xs[i] = u(gen);
      // multiples of 2^-20: adding an integer shift is exact in floating point
      lw[i] = std::ldexp(std::round(std::ldexp(u(gen), 20)), -20);
    }
    double c = std::round(u(gen) * 100.0);
    for (int i = 0; i < 50; ++i) shifted[i] = lw[i] + c;
    auto f = TestFunction::power(3);
    CHECK(snis_from_log_weights(xs, lw, f).value == snis_from_log_weights(xs, shifted, f).value);
    // arbitrary shifts: equal up to rounding of the shifted weights
    double c2 = u(gen) * 1e3;
    for (int i = 0; i < 50; ++i) shifted[i] = lw[i] + c2;
    CHECK(snis_from_log_weights(xs, shifted, f).value ==
          doctest::Approx(snis_from_log_weights(xs, lw, f).value).epsilon(1e-12));
  }
}

TEST_CASE("snis_ctmc examples") {
  JumpPath p;
  p.states = {0.0, 1.0};
  p.holding_times = {2.0, 2.0};
  p.jump_times = {0.0, 2.0};
  CHECK(snis_ctmc(p, TestFunction::identity()).value == doctest::Approx(0.5));
  CHECK(snis_ctmc(p, TestFunction::constant(3.0)).value == doctest::Approx(3.0));
  JumpPath one;
  one.states = {1.7};
  one.holding_times = {0.3};
  one.jump_times = {0.0};
  CHECK(snis_ctmc(one, TestFunction::power(2)).value == doctest::Approx(1.7 * 1.7));
  CHECK_THROWS(snis_ctmc(JumpPath{}, TestFunction::identity()));
}

TEST_CASE("asymptotic variance ratios for tempered Gaussian trials") {
  auto g = Target::gaussian();
  auto x2 = TestFunction::power(2), x4 = TestFunction::power(4);
  CHECK(asymptotic_variance(Trial(g, Tempered{0.4}), g, x2) / target_variance(g, x2) == doctest::Approx(0.576).epsilon(0.001 / 0.576));
  CHECK(asymptotic_variance(Trial(g, Tempered{0.7}), g, x4) / target_variance(g, x4) == doctest::Approx(0.383).epsilon(0.001 / 0.383));
}

TEST_CASE("asymptotic variance with beta = 1 is the target variance") {
  for (const auto& t : {Target::gaussian(), Target::student_t(4), Target::poly_tail(5)})
    for (const auto& f : {TestFunction::indicator(-2, 2), TestFunction::sqrt_abs(), TestFunction::identity()}) {
      double ratio = asymptotic_variance(Trial(t, Tempered{1.0}), t, f) / target_variance(t, f);
      CHECK(ratio == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("asymptotic variance against closed forms and Simpson") {
  auto g = Target::gaussian();
  // target variances of x^2 and x^4 under N(0,1): 2 and 96
  CHECK(target_variance(g, TestFunction::power(2)) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(target_variance(g, TestFunction::power(4)) == doctest::Approx(96.0).epsilon(1e-10));
  // sigma^2(beta, x^2) for N(0,1): integral of (x^2 - 1)^2 phi(x) w(x), w = sqrt(2 pi)^(1-beta)... via Simpson
  const double beta = 0.4;
  double zb = std::sqrt(2.0 * M_PI / beta);
  auto integrand = [&](double x) {
    double phi = std::exp(-x * x / 2) / std::sqrt(2 * M_PI);
    double w = phi / (std::exp(-beta * x * x / 2) / zb);
    return (x * x - 1) * (x * x - 1) * phi * w;
  };
  double oracle = oracle::simpson(integrand, -30, 30, 200000);
  CHECK(asymptotic_variance(Trial(g, Tempered{beta}), g, TestFunction::power(2)) == doctest::Approx(oracle).epsilon(1e-9));
}

TEST_CASE("asymptotic variance reports divergence as +inf") {
  // t4 has no finite 4th moment: sigma^2(Pi, x^2) diverges
  CHECK(std::isinf(target_variance(Target::student_t(4), TestFunction::power(2))));
}

TEST_CASE("finite asymptotic variance equals the exact sum") {
  auto pi = Target::finite({0.5, 0.3, 0.2});
  Trial q(pi, ExplicitFinite{{0.2, 0.3, 0.5}});
  auto f = TestFunction::identity();
  double mu = 0.3 + 0.4;
  double oracle = 0.5 * mu * mu * 2.5 + 0.3 * (1 - mu) * (1 - mu) * 1.0 + 0.2 * (2 - mu) * (2 - mu) * 0.4;
  CHECK(asymptotic_variance(q, pi, f) == doctest::Approx(oracle).epsilon(1e-14));
}

TEST_CASE("worst-case risk examples") {
  std::vector<double> pi{0.7, 0.3}, q{0.5, 0.5};
  auto r = worst_case_risk_finite(pi, q);
  CHECK(r.case_tag == RiskCase::LambdaRoot);
  CHECK(r.risk == doctest::Approx(0.84).epsilon(1e-11));
  CHECK(r.risk == doctest::Approx(oracle::brute_force_risk(pi, q)).epsilon(1e-10));
  CHECK(r.risk == doctest::Approx(4 * 0.7 * 0.3).epsilon(1e-11));

  std::vector<double> p3{0.4, 0.3, 0.3}, q3{0.3, 0.35, 0.35};
  auto r3 = worst_case_risk_finite(p3, q3);
  CHECK(r3.case_tag == RiskCase::LambdaRoot);
  CHECK(*r3.lambda > 6.0 / 7.0);
  CHECK(*r3.lambda < 4.0 / 3.0);
  CHECK(std::abs(r3.risk - oracle::brute_force_risk(p3, q3)) < 1e-3);

  for (std::size_t n : {2, 3, 5}) {
    std::vector<double> p(n, 1.0 / n);
    auto same = worst_case_risk_finite(p, p);
    CHECK(same.case_tag == RiskCase::TiedTop);
    CHECK(same.risk == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("worst-case risk: infinite weight and validation") {
  std::vector<double> pi{0.5, 0.5}, q{1.0, 0.0};
  auto r = worst_case_risk_finite(pi, q);
  CHECK(r.case_tag == RiskCase::InfiniteWeight);
  CHECK(std::isinf(r.risk));
  CHECK_THROWS(worst_case_risk_finite(std::vector<double>{1.0}, std::vector<double>{1.0}));
  CHECK_THROWS(worst_case_risk_finite(std::vector<double>{0.5, 0.6}, std::vector<double>{0.5, 0.5}));
}

TEST_CASE("worst-case risk: root and witness properties") {
  std::mt19937_64 gen(11);
  for (int rep = 0; rep < 100; ++rep) {
    std::size_t n = 2 + gen() % 5;
    auto pi = oracle::random_simplex(gen, n), q = oracle::random_simplex(gen, n);
    auto r = worst_case_risk_finite(pi, q);
    if (r.case_tag != RiskCase::LambdaRoot) continue;
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = pi[i] / q[i];
    auto sorted = w;
    std::sort(sorted.rbegin(), sorted.rend());
    CHECK(*r.lambda > sorted[1]);
    CHECK(*r.lambda < sorted[0]);
    // witness: mean zero, unit variance, attains the risk
    const auto& f = *r.witness;
    double m = 0, v = 0, obj = 0;
    for (std::size_t i = 0; i < n; ++i) {
      m += pi[i] * f[i];
      v += pi[i] * f[i] * f[i];
      obj += pi[i] * f[i] * f[i] * w[i];
    }
    CHECK(std::abs(m) < 1e-8);
    CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(obj == doctest::Approx(r.risk).epsilon(1e-8));
  }
}

TEST_CASE("minimax atom trial") {
  auto t8 = Target::finite({0.8, 0.1, 0.1});
  auto m = minimax_trial_atom(t8, 0);
  CHECK(std::exp(m.trial.log_density(0.0)) == doctest::Approx(0.5));
  CHECK(m.risk == doctest::Approx(0.64).epsilon(1e-15));
  CHECK(worst_case_risk_finite(std::vector<double>{0.8, 0.1, 0.1}, finite_q(m.trial, 3)).risk == doctest::Approx(0.64).epsilon(1e-11));
  CHECK(minimax_trial_atom(Target::finite({0.9, 0.1}), 0).risk == doctest::Approx(0.36).epsilon(1e-15));
  CHECK_THROWS_AS(minimax_trial_atom(Target::finite({0.5, 0.5}), 0), std::invalid_argument);
  CHECK_THROWS_AS(minimax_trial_atom(Target::gaussian(), 0), std::invalid_argument);
}

TEST_CASE("trial family risk") {
  for (double p : {0.6, 0.8, 0.95}) {
    CHECK(trial_family_risk(p, 0.5) == doctest::Approx(4 * p * (1 - p)).epsilon(1e-15));
    CHECK(trial_family_risk(p, p) == doctest::Approx(1.0).epsilon(1e-15));
  }
  CHECK(trial_family_risk(0.8, 0.6) == doctest::Approx(0.16 / 0.24).epsilon(1e-15));
  CHECK_THROWS(trial_family_risk(0.4, 0.5));
  CHECK_THROWS(trial_family_risk(0.8, 1.0));
  // agrees with the worst-case risk of the AtomMixture trial
  auto t = Target::finite({0.8, 0.15, 0.05});
  Trial q(t, AtomMixture{0, 0.6});
  CHECK(worst_case_risk_finite(std::vector<double>{0.8, 0.15, 0.05}, finite_q(q, 3)).risk ==
        doctest::Approx(trial_family_risk(0.8, 0.6)).epsilon(1e-10));
}

TEST_CASE("concentrated set trial") {
  CHECK(set_trial_risk_bound(0.95, 0.0) == doctest::Approx(0.19).epsilon(1e-14));
  CHECK(set_trial_risk_bound(0.95, 0.1) == doctest::Approx(0.19 + 0.45 * 0.9025 * 0.01).epsilon(1e-14));
  auto g = Target::gaussian();
  auto s = concentrated_set_trial(g, -3, 3, 0.5, 0.1);
  CHECK(s.set_mass == doctest::Approx(0.9973002039367398).epsilon(1e-12));
  CHECK(s.in_efficiency_window);
  REQUIRE(s.risk_bound);
  CHECK(*s.risk_bound == doctest::Approx(set_trial_risk_bound(s.set_mass, 0.1)));
  auto outside = concentrated_set_trial(g, -3, 3, 0.999);
  CHECK_FALSE(outside.in_efficiency_window);
  CHECK_FALSE(outside.risk_bound);
  // the two-point function of A has sigma^2 = p(1-p)/(c(1-c)) = 4p(1-p) under c = 1/2
  double p = s.set_mass;
  auto f = two_point_test_function([](double x) { return x >= -3 && x <= 3; }, p);
  double v = asymptotic_variance(s.trial, g, TestFunction(f.name(), [f](double x) { return f(x); }, {-3.0, 3.0}));
  CHECK(v == doctest::Approx(4 * p * (1 - p)).epsilon(1e-8));
}

TEST_CASE("two-point test function") {
  auto half = two_point_test_function([](double x) { return x < 0; }, 0.5);
  CHECK(half(-1.0) == doctest::Approx(1.0));
  CHECK(half(1.0) == doctest::Approx(-1.0));
  auto f = two_point_test_function([](double x) { return x == 0.0; }, 0.8);
  CHECK(f(0.0) == doctest::Approx(0.5));
  CHECK(f(1.0) == doctest::Approx(-2.0));
  CHECK_THROWS(two_point_test_function([](double) { return true; }, 1.0));

  std::mt19937_64 gen(3);
  for (int rep = 0; rep < 100; ++rep) {
    std::size_t n = 2 + gen() % 6;
    auto p = oracle::random_simplex(gen, n);
    std::vector<std::size_t> e;
    for (std::size_t i = 0; i < n - 1; ++i)
      if (gen() % 2) e.push_back(i);
    if (e.empty()) e.push_back(0);
    auto t = Target::finite(p);
    auto fe = two_point_test_function(t, e);
    double m = 0, v = 0;
    for (std::size_t i = 0; i < n; ++i) {
      m += p[i] * fe(static_cast<double>(i));
      v += p[i] * fe(static_cast<double>(i)) * fe(static_cast<double>(i));
    }
    CHECK(std::abs(m) < 1e-12);
    CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("multiple IS") {
  auto pi = Target::finite({0.7, 0.3});
  Trial qx(pi, ExplicitFinite{{0.5, 0.5}}), qy(pi, ExplicitFinite{{0.8, 0.2}});
  CHECK_THROWS(MultipleIsPlan(1.0, 0.5, qx, qy, 1, 1));
  CHECK_THROWS(MultipleIsPlan(0.5, 0.0, qx, qy, 1, 1));

  MultipleIsPlan plan(0.25, 0.4, qx, qy, 2, 3);
  CHECK(plan.n() == 5);
  std::vector<double> xs{0, 1}, ys{0, 0, 1};
  auto f = TestFunction::identity();
  // SNIS_X = 0.6/(1.4+0.6) = 0.3; SNIS_Y: w = (0.875, 1.5), = 1.5/(0.875*2+1.5)
  double sy = 1.5 / (0.875 * 2 + 1.5);
  CHECK(combined_multiple_is(plan, pi, xs, ys, f).value == doctest::Approx(0.25 * 0.3 + 0.75 * sy).epsilon(1e-14));

  // exact finite sums
  auto var = [](std::vector<double> q) {
    double mu = 0.3;
    return 0.7 * mu * mu * 0.7 / q[0] + 0.3 * (1 - mu) * (1 - mu) * 0.3 / q[1];
  };
  double oracle = 0.25 * 0.25 / 0.4 * var({0.5, 0.5}) + 0.75 * 0.75 / 0.6 * var({0.8, 0.2});
  CHECK(multiple_is_asym_variance(plan, pi, f) == doctest::Approx(oracle).epsilon(1e-13));

  // t = delta with Q_X = Q_Y collapses to sigma^2(Q_X, f)
  MultipleIsPlan same(0.3, 0.3, qx, qx, 1, 1);
  CHECK(multiple_is_asym_variance(same, pi, f) == doctest::Approx(asymptotic_variance(qx, pi, f)).epsilon(1e-13));
  auto g = Target::gaussian();
  MultipleIsPlan half(0.5, 0.5, Trial(g, Tempered{1.0}), Trial(g, Tempered{1.0}), 1, 1);
  CHECK(multiple_is_asym_variance(half, g, TestFunction::power(2)) == doctest::Approx(2.0).epsilon(1e-10));
}
