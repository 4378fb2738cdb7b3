#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pathwise/dyadic_path.hpp"
#include "pathwise/fields.hpp"

namespace pathwise {

/// Result of quadrature of a shifted field along a fixed path over a dyadic
/// interval or window. Value is a pure function of
/// (path, field, interval, shifts, quad_level).
struct PathFunctional {
  std::uint64_t path_seed = 0;
  int path_level = 0;
  std::string field;
  double window_a = 0.0;
  double window_b = 1.0;
  std::vector<double> shift_x;
  std::vector<double> shift_y;  // empty for the one-shift form
  int quad_level = 0;
  double value = 0.0;
};

/// sigma_{n,k}(x): left-endpoint Riemann sum of g(t, W(t)+x) - g(t, W(t))
/// over I_{n,k} at spacing 2^-quad_level.
///
/// Cell sums are reduced along the dyadic tree, so sums over an interval
/// equal the sum over its two children exactly.
/// Requires quad_level >= idx.level + 6 and path refined to >= quad_level.
PathFunctional sigma(const DyadicPath& path, const ScalarField& g,
                     DyadicIndex idx, std::span<const double> x,
                     int quad_level);

/// rho_{n,k}(x, y) = sigma_{n,k}(x) - sigma_{n,k}(y), computed in one pass.
PathFunctional rho(const DyadicPath& path, const ScalarField& g,
                   DyadicIndex idx, std::span<const double> x,
                   std::span<const double> y, int quad_level);

/// Window form over [a, b]; endpoints must be dyadic-aligned at level
/// <= quad_level - 6. Satisfies |value| <= 2 (b - a).
PathFunctional rho_window(const DyadicPath& path, const ScalarField& g,
                          double a, double b, std::span<const double> x,
                          int quad_level);

/// Vector occupation increment for drift fields:
/// out = integral over I_{n,k} of f(t, W(t)+x) - f(t, W(t)) dt.
void sigma_drift(const DyadicPath& path, const DriftField& f, DyadicIndex idx,
                 std::span<const double> x, int quad_level,
                 std::span<double> out);

struct ChainResult {
  std::vector<std::vector<double>> points;  // x_0 .. x_r
  double rho_abs_sum = 0.0;  // sum over q of |rho_{n,k+q}(x_{q-1}, x_q)|
  bool regime_ok = true;     // r <= 2^{n/2}
};

/// Iterate x_{q+1} = x_q + sigma_{n,k+q}(x_q) for r steps and accumulate the
/// summed rho statistic. r beyond the 2^{n/2} regime is allowed but flagged.
ChainResult euler_chain(const DyadicPath& path, const DriftField& f, int n,
                        std::uint64_t k, int r, std::span<const double> x0,
                        int quad_level);

}  // namespace pathwise
