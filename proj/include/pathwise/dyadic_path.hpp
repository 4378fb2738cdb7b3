#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace pathwise {

/// Dyadic interval I_{n,k} = [k 2^-n, (k+1) 2^-n] inside [0,1].
struct DyadicIndex {
  int level = 0;
  std::uint64_t k = 0;

  double left() const;
  double right() const;
};

/// A d-dimensional Brownian path on [0,1] stored on the dyadic grid of a
/// given level, refinable in place by bridge bisection.
///
/// Every midpoint draw comes from a generator state derived only from
/// (seed, node level, node index), so refining a coarse path and generating
/// directly at the fine level yield bit-identical values, and already
/// generated nodes never move.
class DyadicPath {
 public:
  static constexpr int kMaxLevel = 24;  // 2^24 doubles per coordinate ~ 134 MB

  static DyadicPath generate(std::uint64_t seed, int dim, int level);

  /// In-place bridge bisection up to target_level. Coarse nodes unchanged.
  void refine_to(int target_level);

  /// Copying counterpart of refine_to.
  DyadicPath refined(int target_level) const;

  int dim() const { return dim_; }
  int level() const { return level_; }
  std::uint64_t seed() const { return seed_; }
  bool frozen() const { return frozen_; }

  /// An immutable path is safely shareable across concurrent readers.
  void freeze() { frozen_ = true; }

  std::size_t node_count() const { return values_.size() / dim_; }
  double time_of(std::size_t i) const;

  double node(std::size_t i, int coord) const {
    return values_[i * static_cast<std::size_t>(dim_) + coord];
  }
  std::span<const double> node(std::size_t i) const {
    return {values_.data() + i * static_cast<std::size_t>(dim_),
            static_cast<std::size_t>(dim_)};
  }
  std::span<const double> raw() const { return values_; }

  bool on_grid(double t) const;

  /// Value at any t in [0,1]; off-grid queries interpolate linearly between
  /// the bracketing nodes (use on_grid() to detect that case).
  void value_at(double t, std::span<double> out) const;

  void dump(std::ostream& out) const;
  static DyadicPath load(std::istream& in);

 private:
  friend DyadicPath rescale_window(const DyadicPath& path, double a, double b);

  DyadicPath(std::uint64_t seed, int dim, int level, std::vector<double> v)
      : seed_(seed), dim_(dim), level_(level), values_(std::move(v)) {}

  std::uint64_t seed_ = 0;
  int dim_ = 1;
  int level_ = 0;
  bool frozen_ = false;
  std::vector<double> values_;  // (2^level + 1) * dim, time-major
};

/// The scaled window path t -> l^{-1/2} (W(a + t l) - W(a)) on [0,1].
/// Requires a, b on the path grid and l = b - a an exact power of two; the
/// result lives at the induced level and is frozen against refinement.
DyadicPath rescale_window(const DyadicPath& path, double a, double b);

}  // namespace pathwise
