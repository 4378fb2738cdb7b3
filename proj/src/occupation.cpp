#include "pathwise/occupation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "pathwise/stats.hpp"

namespace pathwise {

namespace {

constexpr int kOversampleFloor = 6;  // at least 64 cells per interval

void check_levels(const DyadicPath& path, int interval_level, int quad_level) {
  if (quad_level < interval_level + kOversampleFloor)
    throw std::invalid_argument(
        "occupation: quadrature level below the oversampling floor n + 6");
  if (path.level() < quad_level)
    throw std::invalid_argument(
        "occupation: path not refined to the quadrature level");
}

/// Sum integrand over the dyadic cell range [cell_begin, cell_end) at
/// quad_level, splitting the range into maximal dyadic nodes and reducing
/// each node with the pairwise tree. Returns the plain sum of cell values
/// (caller multiplies by the exact power-of-two cell width).
template <class PerCell>
double cell_range_sum(std::uint64_t cell_begin, std::uint64_t cell_end,
                      PerCell&& per_cell) {
  std::vector<double> buf;
  double total = 0.0;
  std::uint64_t a = cell_begin;
  while (a < cell_end) {
    const std::uint64_t fit = std::bit_floor(cell_end - a);
    const std::uint64_t align = a == 0 ? fit : (a & (~a + 1));
    const std::uint64_t size = std::min(align, fit);
    buf.resize(static_cast<std::size_t>(size));
    for (std::uint64_t i = 0; i < size; ++i)
      buf[static_cast<std::size_t>(i)] = per_cell(a + i);
    total += stats::tree_sum_pow2(buf);
    a += size;
  }
  return total;
}

struct ShiftEval {
  const DyadicPath& path;
  const ScalarField& g;
  int stride_shift;  // node index = cell << stride_shift
  int quad_level;
  std::vector<double> buf;

  explicit ShiftEval(const DyadicPath& p, const ScalarField& field,
                     int quad_level_)
      : path(p),
        g(field),
        stride_shift(p.level() - quad_level_),
        quad_level(quad_level_),
        buf(static_cast<std::size_t>(p.dim())) {}

  double at(std::uint64_t cell, std::span<const double> shift) {
    const double t = std::ldexp(static_cast<double>(cell), -quad_level);
    const auto w = path.node(static_cast<std::size_t>(cell << stride_shift));
    for (std::size_t c = 0; c < buf.size(); ++c) buf[c] = w[c] + shift[c];
    return g(t, buf);
  }

  double at_unshifted(std::uint64_t cell) {
    const double t = std::ldexp(static_cast<double>(cell), -quad_level);
    const auto w = path.node(static_cast<std::size_t>(cell << stride_shift));
    return g(t, w);
  }
};

PathFunctional make_functional(const DyadicPath& path, const ScalarField& g,
                               double a, double b, std::span<const double> x,
                               std::span<const double> y, int quad_level,
                               double value) {
  PathFunctional out;
  out.path_seed = path.seed();
  out.path_level = path.level();
  out.field = g.name();
  out.window_a = a;
  out.window_b = b;
  out.shift_x.assign(x.begin(), x.end());
  out.shift_y.assign(y.begin(), y.end());
  out.quad_level = quad_level;
  out.value = value;
  return out;
}

void check_shift(const DyadicPath& path, std::span<const double> x) {
  if (x.size() != static_cast<std::size_t>(path.dim()))
    throw std::invalid_argument("occupation: shift dimension mismatch");
}

}  // namespace

PathFunctional sigma(const DyadicPath& path, const ScalarField& g,
                     DyadicIndex idx, std::span<const double> x,
                     int quad_level) {
  check_levels(path, idx.level, quad_level);
  check_shift(path, x);
  if (idx.level < 0 || idx.k >= (std::uint64_t{1} << idx.level))
    throw std::invalid_argument("sigma: dyadic index out of range");
  const int cells_per_interval = quad_level - idx.level;
  const std::uint64_t begin = idx.k << cells_per_interval;
  const std::uint64_t end = (idx.k + 1) << cells_per_interval;
  ShiftEval eval(path, g, quad_level);
  const double sum = cell_range_sum(begin, end, [&](std::uint64_t cell) {
    return eval.at(cell, x) - eval.at_unshifted(cell);
  });
  const double value = std::ldexp(sum, -quad_level);
  return make_functional(path, g, idx.left(), idx.right(), x, {}, quad_level,
                         value);
}

PathFunctional rho(const DyadicPath& path, const ScalarField& g,
                   DyadicIndex idx, std::span<const double> x,
                   std::span<const double> y, int quad_level) {
  check_levels(path, idx.level, quad_level);
  check_shift(path, x);
  check_shift(path, y);
  if (idx.level < 0 || idx.k >= (std::uint64_t{1} << idx.level))
    throw std::invalid_argument("rho: dyadic index out of range");
  const int cells_per_interval = quad_level - idx.level;
  const std::uint64_t begin = idx.k << cells_per_interval;
  const std::uint64_t end = (idx.k + 1) << cells_per_interval;
  ShiftEval eval(path, g, quad_level);
  const double sum = cell_range_sum(begin, end, [&](std::uint64_t cell) {
    return eval.at(cell, x) - eval.at(cell, y);
  });
  const double value = std::ldexp(sum, -quad_level);
  return make_functional(path, g, idx.left(), idx.right(), x, y, quad_level,
                         value);
}

PathFunctional rho_window(const DyadicPath& path, const ScalarField& g,
                          double a, double b, std::span<const double> x,
                          int quad_level) {
  check_levels(path, 0, quad_level);
  check_shift(path, x);
  if (!(a >= 0.0 && a < b && b <= 1.0))
    throw std::invalid_argument("rho_window: need 0 <= a < b <= 1");
  const int align_level = quad_level - kOversampleFloor;
  const double a_scaled = std::ldexp(a, align_level);
  const double b_scaled = std::ldexp(b, align_level);
  if (a_scaled != std::floor(a_scaled) || b_scaled != std::floor(b_scaled))
    throw std::invalid_argument(
        "rho_window: window must be dyadic-aligned at level quad_level - 6");
  const std::uint64_t begin = static_cast<std::uint64_t>(a_scaled)
                              << kOversampleFloor;
  const std::uint64_t end = static_cast<std::uint64_t>(b_scaled)
                            << kOversampleFloor;
  ShiftEval eval(path, g, quad_level);
  const double sum = cell_range_sum(begin, end, [&](std::uint64_t cell) {
    return eval.at(cell, x) - eval.at_unshifted(cell);
  });
  const double value = std::ldexp(sum, -quad_level);
  return make_functional(path, g, a, b, x, {}, quad_level, value);
}

void sigma_drift(const DyadicPath& path, const DriftField& f, DyadicIndex idx,
                 std::span<const double> x, int quad_level,
                 std::span<double> out) {
  check_levels(path, idx.level, quad_level);
  const std::size_t d = static_cast<std::size_t>(path.dim());
  if (x.size() != d || out.size() != d)
    throw std::invalid_argument("sigma_drift: dimension mismatch");
  if (idx.k >= (std::uint64_t{1} << idx.level))
    throw std::invalid_argument("sigma_drift: dyadic index out of range");
  const int cells_per_interval = quad_level - idx.level;
  const std::uint64_t begin = idx.k << cells_per_interval;
  const std::uint64_t count = std::uint64_t{1} << cells_per_interval;
  const int stride_shift = path.level() - quad_level;

  std::vector<double> diffs(static_cast<std::size_t>(count) * d);
  std::vector<double> shifted(d), fx(d), f0(d);
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::uint64_t cell = begin + i;
    const double t = std::ldexp(static_cast<double>(cell), -quad_level);
    const auto w = path.node(static_cast<std::size_t>(cell << stride_shift));
    for (std::size_t c = 0; c < d; ++c) shifted[c] = w[c] + x[c];
    f(t, shifted, fx);
    f(t, w, f0);
    for (std::size_t c = 0; c < d; ++c)
      diffs[c * count + i] = fx[c] - f0[c];
  }
  for (std::size_t c = 0; c < d; ++c) {
    std::span<double> coord(diffs.data() + c * count,
                            static_cast<std::size_t>(count));
    out[c] = std::ldexp(stats::tree_sum_pow2(coord), -quad_level);
  }
}

ChainResult euler_chain(const DyadicPath& path, const DriftField& f, int n,
                        std::uint64_t k, int r, std::span<const double> x0,
                        int quad_level) {
  if (r < 0) throw std::invalid_argument("euler_chain: negative length");
  if (n < 0 || k + static_cast<std::uint64_t>(r) >= (std::uint64_t{1} << n))
    throw std::invalid_argument("euler_chain: chain runs past the last interval");
  const std::size_t d = static_cast<std::size_t>(path.dim());
  if (x0.size() != d)
    throw std::invalid_argument("euler_chain: start dimension mismatch");

  ChainResult res;
  res.regime_ok =
      static_cast<double>(r) * static_cast<double>(r) <= std::ldexp(1.0, n);
  res.points.reserve(static_cast<std::size_t>(r) + 1);
  res.points.emplace_back(x0.begin(), x0.end());

  std::vector<double> inc(d);
  for (int q = 0; q < r; ++q) {
    const auto& cur = res.points.back();
    sigma_drift(path, f, {n, k + static_cast<std::uint64_t>(q)}, cur,
                quad_level, inc);
    std::vector<double> next(d);
    for (std::size_t c = 0; c < d; ++c) next[c] = cur[c] + inc[c];
    res.points.push_back(std::move(next));
  }

  std::vector<double> rx(d), ry(d);
  for (int q = 1; q <= r; ++q) {
    const DyadicIndex idx{n, k + static_cast<std::uint64_t>(q)};
    sigma_drift(path, f, idx, res.points[static_cast<std::size_t>(q) - 1],
                quad_level, rx);
    sigma_drift(path, f, idx, res.points[static_cast<std::size_t>(q)],
                quad_level, ry);
    double s = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      const double diff = rx[c] - ry[c];
      s += diff * diff;
    }
    res.rho_abs_sum += std::sqrt(s);
  }
  return res;
}

}  // namespace pathwise
