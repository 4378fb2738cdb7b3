#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pathwise/kernel_lab.hpp"
#include "pathwise/quadrature.hpp"

namespace oracles {

double trapezoid_sigma(const pathwise::DyadicPath& path,
                       const pathwise::ScalarField& g, int n, std::uint64_t k,
                       std::span<const double> x, int quad_level) {
  if (path.level() < quad_level)
    throw std::invalid_argument("trapezoid_sigma: path too coarse");
  const int stride_shift = path.level() - quad_level;
  const std::uint64_t begin = k << (quad_level - n);
  const std::uint64_t end = (k + 1) << (quad_level - n);
  const double dt = std::ldexp(1.0, -quad_level);
  const std::size_t d = static_cast<std::size_t>(path.dim());
  std::vector<double> buf(d);
  auto integrand = [&](std::uint64_t cell) {
    const double t = std::ldexp(static_cast<double>(cell), -quad_level);
    const auto w = path.node(static_cast<std::size_t>(cell << stride_shift));
    for (std::size_t c = 0; c < d; ++c) buf[c] = w[c] + x[c];
    return g(t, buf) - g(t, w);
  };
  double acc = 0.0;
  double prev = integrand(begin);
  for (std::uint64_t cell = begin; cell < end; ++cell) {
    const double next = integrand(cell + 1);
    acc += 0.5 * (prev + next) * dt;
    prev = next;
  }
  return acc;
}

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// P(W_s in I, W_t in J) for 0 < s < t: integrate the s-marginal density
// against the conditional cdf difference, splitting at the cdf kink points.
double rectangle_probability(double s, double t, const Piece& i_piece,
                             const Piece& j_piece) {
  const double tau = t - s;
  const double sqrt_s = std::sqrt(s);
  const double sqrt_tau = std::sqrt(tau);
  auto inner = [&](double zeta) {
    const double hi = normal_cdf((j_piece.hi - zeta) / sqrt_tau);
    const double lo = normal_cdf((j_piece.lo - zeta) / sqrt_tau);
    const double dens = std::exp(-zeta * zeta / (2.0 * s)) /
                        (sqrt_s * std::sqrt(2.0 * std::numbers::pi));
    return dens * (hi - lo);
  };
  std::vector<double> cuts = {i_piece.lo, i_piece.hi};
  for (double c : {j_piece.lo, j_piece.hi})
    if (c > i_piece.lo && c < i_piece.hi) cuts.push_back(c);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
    total += pathwise::quadrature::adaptive_gk15(inner, cuts[k], cuts[k + 1],
                                                 1e-9, 1e-13);
  return total;
}

}  // namespace

double second_moment_pw_const(const std::vector<Piece>& h) {
  auto covariance_sum = [&](double s, double t) {
    double acc = 0.0;
    for (const auto& pi : h)
      for (const auto& pj : h)
        acc += pi.coeff * pj.coeff * rectangle_probability(s, t, pi, pj);
    return acc;
  };
  auto inner_s = [&](double t) {
    return pathwise::quadrature::adaptive_gk15(
        [&](double s) { return covariance_sum(s, t); }, 0.0, t, 1e-7, 1e-11,
        24);
  };
  const double outer = pathwise::quadrature::adaptive_gk15(
      inner_s, 0.0, 1.0, 1e-7, 1e-11, 24);
  return 2.0 * outer;
}

std::vector<Piece> difference_pieces(const std::string& field_name, double x) {
  if (!(x > 0.0 && x < 1.0))
    throw std::invalid_argument("difference_pieces: need 0 < x < 1");
  if (field_name == "sign") return {{-x, 0.0, 2.0}};
  if (field_name == "box_indicator")
    return {{-1.0 - x, -1.0, 1.0}, {1.0 - x, 1.0, -1.0}};
  if (field_name == "radial_step")
    return {{-1.0 - x, -1.0, 2.0}, {1.0 - x, 1.0, -2.0}};
  throw std::invalid_argument("difference_pieces: no tractable pieces for " +
                              field_name);
}

std::vector<Piece> field_pieces(const std::string& field_name) {
  if (field_name == "box_indicator") return {{-1.0, 1.0, 1.0}};
  throw std::invalid_argument("field_pieces: no tractable pieces for " +
                              field_name);
}

std::uint64_t brute_force_allowed_count(int k) {
  if (k < 1 || k > 12)
    throw std::invalid_argument("brute_force_allowed_count: k outside [1,12]");
  std::uint64_t total = 1;
  for (int i = 0; i < k; ++i) total *= 3;
  std::uint64_t count = 0;
  std::string word(static_cast<std::size_t>(k), 'E');
  for (std::uint64_t code = 0; code < total; ++code) {
    std::uint64_t c = code;
    for (int i = 0; i < k; ++i) {
      word[static_cast<std::size_t>(i)] = "EBD"[c % 3];
      c /= 3;
    }
    if (pathwise::Word::allowed(word)) ++count;
  }
  return count;
}

}  // namespace oracles
