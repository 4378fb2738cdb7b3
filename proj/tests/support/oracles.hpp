#pragma once

// Test-only oracles, kept independent of the library's computation paths:
// plain sequential quadrature rules and closed-form Gaussian identities used
// to freeze expected values.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pathwise/dyadic_path.hpp"
#include "pathwise/fields.hpp"

namespace oracles {

/// Trapezoid-rule evaluation of the occupation functional over I_{n,k}
/// (sequential accumulation, not the tree reduction used by the library).
double trapezoid_sigma(const pathwise::DyadicPath& path,
                       const pathwise::ScalarField& g, int n, std::uint64_t k,
                       std::span<const double> x, int quad_level);

/// One signed constant piece of a piecewise-constant function on R.
struct Piece {
  double lo;
  double hi;
  double coeff;
};

/// Deterministic value of E[(integral_0^1 h(W_t) dt)^2] for piecewise
/// constant h, through the heat-kernel double integral
///   2 int_0^1 dt int_0^t ds  sum_ij c_i c_j P(W_s in I_i, W_t in I_j)
/// with the spatial rectangle probabilities reduced to 1-D quadrature of
/// normal cdf differences.
double second_moment_pw_const(const std::vector<Piece>& h);

/// Pieces of z -> g(z + x) - g(z) for the piecewise-constant catalog entries
/// (sign, box_indicator, radial_step) in one dimension; requires 0 < x < 1.
std::vector<Piece> difference_pieces(const std::string& field_name, double x);

/// Pieces of g itself (box_indicator only).
std::vector<Piece> field_pieces(const std::string& field_name);

/// Count words over {E,B,D} of length k passing the deletion test, by
/// scanning all 3^k candidates. Practical for k <= 12.
std::uint64_t brute_force_allowed_count(int k);

}  // namespace oracles
