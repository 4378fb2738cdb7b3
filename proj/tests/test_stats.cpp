#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "pathwise/quadrature.hpp"
#include "pathwise/rng.hpp"
#include "pathwise/stats.hpp"

using namespace pathwise;

TEST_CASE("tree sum equals child sums bit-for-bit") {
  std::vector<double> v(64);
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = std::sin(static_cast<double>(i) + 0.37);
  std::vector<double> whole = v;
  std::vector<double> left(v.begin(), v.begin() + 32);
  std::vector<double> right(v.begin() + 32, v.end());
  const double total = stats::tree_sum_pow2(whole);
  const double halves =
      stats::tree_sum_pow2(left) + stats::tree_sum_pow2(right);
  CHECK(total == halves);
}

TEST_CASE("tree sum rejects non-power-of-two input") {
  std::vector<double> v(5, 1.0);
  CHECK_THROWS_AS(stats::tree_sum_pow2(v), std::invalid_argument);
}

TEST_CASE("pairwise sum matches high-precision reference") {
  std::vector<double> v(100001);
  long double ref = 0.0L;
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = 1.0 / static_cast<double>(i + 1);
    ref += v[i];
  }
  CHECK(stats::pairwise_sum(v) ==
        doctest::Approx(static_cast<double>(ref)).epsilon(1e-14));
}

TEST_CASE("mean and variance") {
  std::vector<double> v = {1.0, 2.0, 3.0, 4.0};
  const auto mv = stats::mean_variance(v);
  CHECK(mv.mean == doctest::Approx(2.5));
  CHECK(mv.variance == doctest::Approx(5.0 / 3.0));
  CHECK(stats::ci_half_width_99(4.0, 400) == doctest::Approx(2.576 * 0.1));
}

TEST_CASE("normal cdf reference points") {
  CHECK(stats::normal_cdf(0.0) == doctest::Approx(0.5));
  CHECK(stats::normal_cdf(1.959964) == doctest::Approx(0.975).epsilon(1e-5));
  CHECK(stats::normal_cdf(-8.0) < 1e-14);
}

TEST_CASE("ks statistic separates right and wrong distributions") {
  std::vector<double> good(4096), bad(4096);
  for (std::size_t i = 0; i < good.size(); ++i) {
    good[i] = rng::node_gaussian(77, 1, i, 0);
    bad[i] = rng::uniform_at(77, i, 1);
  }
  CHECK(stats::ks_statistic_normal(good) < stats::ks_critical_1pct(4096));
  CHECK(stats::ks_statistic_normal(bad) > 10.0 * stats::ks_critical_1pct(4096));
}

TEST_CASE("regularized incomplete beta against closed forms") {
  // I_x(1, n) = 1 - (1-x)^n
  for (double x : {0.1, 0.5, 0.9})
    for (int n : {1, 3, 10})
      CHECK(stats::reg_inc_beta(1.0, n, x) ==
            doctest::Approx(1.0 - std::pow(1.0 - x, n)).epsilon(1e-12));
  // symmetry I_x(a,b) = 1 - I_{1-x}(b,a)
  CHECK(stats::reg_inc_beta(3.5, 2.25, 0.3) ==
        doctest::Approx(1.0 - stats::reg_inc_beta(2.25, 3.5, 0.7))
            .epsilon(1e-12));
}

TEST_CASE("clopper-pearson endpoints match the closed forms") {
  const double conf = 0.99;
  const double alpha = 1.0 - conf;
  const auto zero = stats::clopper_pearson(0, 50, conf);
  CHECK(zero.lo == 0.0);
  CHECK(zero.hi ==
        doctest::Approx(1.0 - std::pow(alpha / 2.0, 1.0 / 50.0)).epsilon(1e-9));
  const auto full = stats::clopper_pearson(50, 50, conf);
  CHECK(full.hi == 1.0);
  CHECK(full.lo ==
        doctest::Approx(std::pow(alpha / 2.0, 1.0 / 50.0)).epsilon(1e-9));
  const auto mid = stats::clopper_pearson(20, 100, conf);
  CHECK(mid.lo < 0.2);
  CHECK(mid.hi > 0.2);
  CHECK(mid.hi - mid.lo < 0.25);
}

TEST_CASE("factorial") {
  CHECK(stats::factorial(0) == 1.0);
  CHECK(stats::factorial(4) == 24.0);
  CHECK_THROWS_AS(stats::factorial(-1), std::invalid_argument);
}

TEST_CASE("gauss-kronrod panel integrates polynomials exactly") {
  const auto poly = [](double x) { return 5 * x * x * x * x - 2 * x + 1; };
  const auto p = quadrature::gk15(poly, -1.0, 2.0);
  // integral of the quintic antiderivative: x^5 - x^2 + x over [-1, 2]
  const double exact = (32.0 - 4.0 + 2.0) - (-1.0 - 1.0 - 1.0);
  CHECK(p.kronrod == doctest::Approx(exact).epsilon(1e-14));
  CHECK(p.gauss == doctest::Approx(exact).epsilon(1e-14));
}

TEST_CASE("adaptive quadrature handles kinks and gaussians") {
  const double gauss = quadrature::adaptive_gk15(
      [](double x) { return std::exp(-x * x / 2.0); }, -12.0, 12.0, 1e-10,
      1e-14);
  CHECK(gauss == doctest::Approx(std::sqrt(2.0 * std::numbers::pi))
                     .epsilon(1e-10));
  const double vee = quadrature::adaptive_gk15(
      [](double x) { return std::fabs(x); }, -1.0, 2.0, 1e-10, 1e-14);
  CHECK(vee == doctest::Approx(2.5).epsilon(1e-9));
}
