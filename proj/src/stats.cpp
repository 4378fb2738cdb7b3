#include "pathwise/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pathwise::stats {

double tree_sum_pow2(std::span<double> buf) {
  const std::size_t n = buf.size();
  if (n == 0) return 0.0;
  if ((n & (n - 1)) != 0)
    throw std::invalid_argument("tree_sum_pow2: length must be a power of two");
  for (std::size_t width = n; width > 1; width /= 2) {
    for (std::size_t i = 0; i < width / 2; ++i)
      buf[i] = buf[2 * i] + buf[2 * i + 1];
  }
  return buf[0];
}

double pairwise_sum(std::span<const double> v) {
  const std::size_t n = v.size();
  if (n <= 32) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

MeanVar mean_variance(std::span<const double> v) {
  MeanVar out;
  const std::size_t n = v.size();
  if (n == 0) return out;
  out.mean = pairwise_sum(v) / static_cast<double>(n);
  if (n == 1) return out;
  std::vector<double> dev(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = v[i] - out.mean;
    dev[i] = d * d;
  }
  out.variance = pairwise_sum(dev) / static_cast<double>(n - 1);
  return out;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double ks_statistic_normal(std::vector<double> sample) {
  std::sort(sample.begin(), sample.end());
  const std::size_t n = sample.size();
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = normal_cdf(sample[i]);
    const double lo = f - static_cast<double>(i) / static_cast<double>(n);
    const double hi = static_cast<double>(i + 1) / static_cast<double>(n) - f;
    d = std::max({d, lo, hi});
  }
  return d;
}

namespace {

double ibeta_cf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 1e-15;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double reg_inc_beta(double a, double b, double x) {
  if (a <= 0.0 || b <= 0.0)
    throw std::invalid_argument("reg_inc_beta: a, b must be positive");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                       a * std::log(x) + b * std::log1p(-x);
  const double bt = std::exp(ln_bt);
  if (x < (a + 1.0) / (a + b + 2.0)) return bt * ibeta_cf(a, b, x) / a;
  return 1.0 - bt * ibeta_cf(b, a, 1.0 - x) / b;
}

namespace {

// Solve reg_inc_beta(a, b, p) == target for p by bisection; the map is
// increasing in p.
double ibeta_solve(double a, double b, double target) {
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (reg_inc_beta(a, b, mid) < target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

Interval clopper_pearson(std::uint64_t k, std::uint64_t n, double confidence) {
  if (n == 0 || k > n)
    throw std::invalid_argument("clopper_pearson: need 0 <= k <= n, n > 0");
  if (confidence <= 0.0 || confidence >= 1.0)
    throw std::invalid_argument("clopper_pearson: confidence in (0,1)");
  const double alpha = 1.0 - confidence;
  const double kk = static_cast<double>(k);
  const double nn = static_cast<double>(n);
  Interval out;
  // P(X >= k; p) = I_p(k, n-k+1), P(X <= k; p) = 1 - I_p(k+1, n-k).
  if (k > 0) out.lo = ibeta_solve(kk, nn - kk + 1.0, alpha / 2.0);
  if (k < n) out.hi = ibeta_solve(kk + 1.0, nn - kk, 1.0 - alpha / 2.0);
  return out;
}

double factorial(int n) {
  if (n < 0) throw std::invalid_argument("factorial: negative argument");
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace pathwise::stats
