#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace pathwise::stats {

/// Sum of a power-of-two block by in-place bottom-up pairwise halving.
/// The reduction tree matches the dyadic interval tree exactly, so sums over
/// a dyadic node equal the sum of its two children bit-for-bit. Destroys buf.
double tree_sum_pow2(std::span<double> buf);

/// Deterministic pairwise sum of an arbitrary-length range (fixed recursion
/// structure, independent of threading).
double pairwise_sum(std::span<const double> v);

struct MeanVar {
  double mean = 0.0;
  double variance = 0.0;  // sample variance (n-1 denominator)
};

MeanVar mean_variance(std::span<const double> v);

/// 99% normal-approximation half-width used across estimate summaries.
inline double ci_half_width_99(double sample_variance, std::size_t n_rep) {
  return n_rep > 0
             ? 2.576 * std::sqrt(sample_variance / static_cast<double>(n_rep))
             : 0.0;
}

double normal_cdf(double x);

/// Two-sided Kolmogorov-Smirnov statistic of a sample against N(0,1).
double ks_statistic_normal(std::vector<double> sample);

/// Asymptotic 1% KS critical value for sample size n.
inline double ks_critical_1pct(std::size_t n) {
  return 1.6276 / std::sqrt(static_cast<double>(n));
}

/// Regularized incomplete beta I_x(a, b).
double reg_inc_beta(double a, double b, double x);

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

/// Clopper-Pearson exact binomial confidence interval for k successes in n.
Interval clopper_pearson(std::uint64_t k, std::uint64_t n, double confidence);

double factorial(int n);

}  // namespace pathwise::stats
