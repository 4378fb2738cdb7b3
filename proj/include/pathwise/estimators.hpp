#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "pathwise/fields.hpp"

namespace pathwise {

struct EstimateCell {
  std::map<std::string, double> params;
  double estimate = 0.0;
  double variance = 0.0;
  double ci_half = 0.0;
  double fitted_c = 0.0;
  double envelope = 0.0;
  bool has_envelope = false;
  bool pass = true;
};

/// Monte Carlo estimate record. Re-running with the same base seed and
/// replica count reproduces every number bit-identically regardless of the
/// worker count: replica i draws from a generator derived from (seed, i) and
/// reduction runs in fixed replica order.
struct EstimateSummary {
  std::string experiment;
  std::uint64_t base_seed = 0;
  int n_rep = 0;
  int quad_level = 0;
  double estimate = 0.0;
  double variance = 0.0;
  double ci_half = 0.0;
  double fitted_c = 0.0;
  std::vector<EstimateCell> cells;
  bool all_pass = true;
};

/// rho(x) over the window [a, b] for n_rep fresh paths, one value per
/// replica, in replica order.
std::vector<double> replica_rho_values(const ScalarField& g,
                                       std::span<const double> x, double a,
                                       double b, int n_rep, std::uint64_t seed,
                                       int quad_level, int workers);

/// Integral of g(t, W(t)) dt over [0,1] per replica (no shift).
std::vector<double> replica_field_integrals(const ScalarField& g, int n_rep,
                                            std::uint64_t seed, int quad_level,
                                            int workers);

/// E[rho(x)^p] with the normalized ratio (E / ((p/2)! |x|^p))^{1/p} reported
/// as the fitted constant. p must be even, 2 <= p <= 8.
EstimateSummary moment_bound(const ScalarField& g, std::span<const double> x,
                             int p, int n_rep, std::uint64_t seed,
                             int quad_level, int workers);

/// Per-x fitted constants over a shift grid; headline is the max. Flags
/// monotone growth toward x -> 0, which would contradict the bound's shape.
EstimateSummary constant_sweep(const ScalarField& g, int p,
                               std::span<const double> x_grid, int n_rep,
                               std::uint64_t seed, int quad_level, int workers);

/// Empirical exceedance of |rho(x)| >= lambda l^{1/2} |x| per lambda, tested
/// against 2 exp(-lambda^2 / (2 (1.2 c_hat)^2)) plus three Clopper-Pearson
/// half-widths.
EstimateSummary tail_bound(const ScalarField& g, std::span<const double> x,
                           double a, double b,
                           std::span<const double> lambda_grid, int n_rep,
                           std::uint64_t seed, double c_hat, int quad_level,
                           int workers);

/// E[(integral of g(t, W(t)) dt)^2] against ||g||_p^2; requires p > 1 + d/2
/// and a field with an analytic L^p norm.
EstimateSummary l2_functional_bound(const ScalarField& g, double p, int n_rep,
                                    std::uint64_t seed, int quad_level,
                                    int workers);

/// Per-n maxima of |rho_nk| and |sigma_nk| over k, a fixed dyadic shift set,
/// and n_rep paths, normalized by the scaling shapes
///   rho:   2^{-n/2} |x-y| (n^{1/2} + log+(1/|x-y|)^{1/2})
///   sigma: n^{1/2} 2^{-n/2} (|x| + 2^{-2^n}).
/// quad_level is lifted per n to at least n + 6.
EstimateSummary dyadic_modulus_sweep(const ScalarField& g,
                                     std::span<const int> n_grid, int n_rep,
                                     std::uint64_t seed, int quad_level,
                                     int workers);

/// Shift set used by dyadic_modulus_sweep (first-axis dyadic shifts).
std::vector<double> dyadic_shift_values();
std::vector<std::pair<double, double>> dyadic_shift_pairs();

}  // namespace pathwise
