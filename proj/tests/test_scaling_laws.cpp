#include <cmath>

#include "doctest.h"
#include "goldens.hpp"
#include "moscale/det_equiv.hpp"
#include "moscale/scaling_laws.hpp"

using namespace moscale;

TEST_CASE("loss components") {
  const auto p = make_power_law(0.5, 0.5, 0.5);
  const auto c = loss_components(p, {SampleSize::of(1000), 0.9, 0.001});
  CHECK(c.finite_data == doctest::Approx(0.01));
  CHECK(c.mixture == doctest::Approx(0.005));
  CHECK(c.overfitting == doctest::Approx(0.005));
  CHECK(c.total == doctest::Approx(0.02));

  const auto one = loss_components(p, {SampleSize::of(50), 1.0, 0.01});
  CHECK(one.mixture == 0.0);
  CHECK(one.overfitting == 0.0);
  CHECK(one.total == one.finite_data);

  CHECK_THROWS_AS(loss_components(p, {SampleSize::of(50), 0.9, 1.0}), DomainError);
  CHECK_THROWS_AS(loss_components(p, {SampleSize::of(50), 0.4, 0.1}), DomainError);
}

TEST_CASE("excess components") {
  const auto p = make_power_law(0.5, 2.0, 0.5);
  const auto c = excess_components(p, {SampleSize::of(100), 0.9, 0.01});
  CHECK(c.finite_data == doctest::Approx(goldens::excess_finite_data).epsilon(1e-14));
  CHECK(c.mixture_finite_data ==
        doctest::Approx(goldens::excess_mixture_finite_data).epsilon(1e-14));
  CHECK(c.overfitting == doctest::Approx(goldens::excess_overfitting).epsilon(1e-14));
  CHECK(c.total == doctest::Approx(goldens::excess_total).epsilon(1e-14));

  const auto q = make_power_law(0.5, 0.8, 0.5);
  const auto e = excess_components(q, {SampleSize::of(100), 0.8, 0.01});
  CHECK(e.mixture_finite_data == doctest::Approx(0.2 * 0.5 * e.finite_data));
  const auto one = excess_components(q, {SampleSize::of(100), 1.0, 0.01});
  CHECK(one.total == one.finite_data);
  CHECK_THROWS_AS(excess_components(q, {SampleSize::of(100), 0.7, 0.01}), DomainError);
}

TEST_CASE("loss regimes") {
  const auto p = make_power_law(0.5, 0.5, 0.5);
  const auto r = opt_loss_regime(p, 100, 0.9);
  CHECK(r.boundaries.first == doctest::Approx(20.0));
  CHECK(r.boundaries.second == doctest::Approx(2000.0));
  CHECK(r.regime == Regime::R2);
  CHECK(opt_loss_regime(p, 10, 0.9).regime == Regime::R1);
  CHECK(opt_loss_regime(p, 1e4, 0.9).regime == Regime::R3);
  CHECK(opt_loss_regime(p, 1e4, 0.9).exponent == 0.0);
  // a boundary value belongs to the lower regime
  CHECK(opt_loss_regime(p, r.boundaries.first, 0.9).regime == Regime::R1);
  CHECK(opt_loss_regime(p, r.boundaries.second, 0.9).regime == Regime::R2);

  for (double n : {1.0, 1e3, 1e9}) {
    const auto one = opt_loss_regime(p, n, 1.0);
    CHECK(one.regime == Regime::R1);
    CHECK(one.exponent == doctest::Approx(p.nu()));
  }

  // language-model exponent: gamma = delta = 0.17 gives nu = 0.34
  const auto lm = make_power_law(0.17, 0.17, 0.5);
  CHECK(lm.nu() == doctest::Approx(0.34));
  CHECK(opt_loss_regime(lm, 1, 0.9).exponent == doctest::Approx(0.34));
  CHECK(opt_loss_regime(lm, 1e6, 0.9).exponent == doctest::Approx(0.2537).epsilon(1e-3));
  CHECK(opt_loss_regime(lm, 1e300, 0.9).exponent == 0.0);
  CHECK_THROWS_AS(opt_loss_regime(p, 10, 0.3), DomainError);
}

TEST_CASE("excess regimes") {
  const auto p = make_power_law(0.5, 2.5, 0.5);
  CHECK(p.nu() == doctest::Approx(3.0));
  CHECK(p.nu_prime() == doctest::Approx(1.5));
  const auto r = opt_excess_regime(p, 10, 0.9);
  CHECK(r.boundaries.second == doctest::Approx(goldens::excess_r3_boundary).epsilon(1e-13));
  CHECK(r.r3_reachable);
  const auto r3 = opt_excess_regime(p, 1e4, 0.9);
  CHECK(r3.regime == Regime::R3);
  CHECK(r3.exponent == doctest::Approx(1.5 / 2.5));

  const auto q = make_power_law(0.5, 0.9, 0.5);
  for (double n : {10.0, 1e4, 1e12}) {
    const auto s = opt_excess_regime(q, n, 0.8);
    CHECK_FALSE(s.r3_reachable);
    CHECK(s.regime != Regime::R3);
  }
  CHECK_THROWS_AS(opt_excess_regime(p, 10, 0.7), DomainError);
}

TEST_CASE("exact lambda optimum against a dense grid oracle") {
  const auto p = make_power_law(0.5, 0.5, 0.5, 100000);
  const auto o = optimize_lambda_exact(p, 10000, 0.9, Objective::Loss);
  CHECK_FALSE(o.fallback);
  CHECK(o.value <= goldens::opt_lambda_n1e4_grid_value * (1 + 1e-12));
  CHECK(o.value >= goldens::opt_lambda_n1e4_grid_value * (1 - 1e-4));
  const double step = std::log(0.5 / 1e-8) / 399;
  CHECK(std::abs(std::log(o.lambda / goldens::opt_lambda_n1e4_grid_lambda)) < step);
}

TEST_CASE("optimised loss with all labels on one objective tracks N^-nu") {
  const auto p = make_power_law(0.5, 0.5, 0.5, 100000);
  // ratio to N^{-1} measured over N in [100, 10^4]: 2.83 .. 2.87
  for (std::uint64_t n = 100; n <= 10000; n *= 10) {
    const double r = optimize_lambda_exact(p, n, 1.0, Objective::Loss).value * n;
    CHECK(r > 2.5);
    CHECK(r < 3.2);
  }
}

TEST_CASE("more data never hurts under optimal regularisation") {
  const auto p = make_power_law(0.5, 0.5, 0.5, 100000);
  for (double a : {0.6, 0.9, 1.0}) {
    double prev = kInfinity;
    for (std::uint64_t n = 1; n <= 1000000; n *= 3) {
      const double v = optimize_lambda_exact(p, n, a, Objective::Loss).value;
      CHECK(v <= prev * (1 + 1e-9));
      prev = v;
    }
  }
}

TEST_CASE("excess is non-negative and consistent with the loss") {
  const auto p = make_power_law(0.5, 0.5, 0.5, 100000);
  for (std::uint64_t n : {3ULL, 300ULL, 30000ULL}) {
    const auto e = optimize_lambda_exact(p, n, 0.9, Objective::Excess);
    CHECK(e.value >= 0.0);
    const auto l = optimize_lambda_exact(p, n, 0.9, Objective::Loss);
    CHECK(e.value == doctest::Approx(l.value - l1_infinite_ridgeless(p, 0.9)).epsilon(1e-6));
  }
}

TEST_CASE("components track the exact optimum within a constant band") {
  const auto p = make_power_law(0.5, 0.5, 0.5, 100000);
  double lo = kInfinity, hi = 0;
  for (std::uint64_t n = 10; n <= 1000000; n *= 10)
    for (double lam = 1e-6; lam < 0.5; lam *= 10) {
      const RidgeConfig c{SampleSize::of(n), 0.9, lam};
      const double r = l1_det_expected(p, c).value / loss_components(p, c).total;
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
  INFO("band [", lo, ", ", hi, "]");
  CHECK(lo > 0.1);
  CHECK(hi < 10.0);
}

TEST_CASE("vanishing regularisation is suboptimal at large N") {
  const auto p = make_power_law(0.5, 0.5, 0.5, 100000);
  const std::uint64_t n = 50000;
  const double fast = std::pow(static_cast<double>(n), -2.0 * 1.5);
  const double v = l1_det_expected(p, {SampleSize::of(n), 0.95, fast}).value;
  const double opt = optimize_lambda_exact(p, n, 0.95, Objective::Loss).value;
  CHECK(v > 1.5 * opt);
}

TEST_CASE("search range validation") {
  const auto p = make_power_law(0.5, 0.5, 0.5, 1000);
  LambdaSearch bad;
  bad.lambda_lo = 0.6;
  CHECK_THROWS_AS(optimize_lambda_exact(p, 10, 0.9, Objective::Loss, bad), ParameterError);
  CHECK_THROWS_AS(optimize_lambda_exact(p, 0, 0.9, Objective::Loss), DomainError);
}
