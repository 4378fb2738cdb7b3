#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pathwise/dyadic_path.hpp"
#include "pathwise/fields.hpp"

namespace pathwise {

/// Strictly increasing time grid on [0, T]. The mesh is always recomputed
/// from the times, never cached.
struct Partition {
  std::vector<double> times;

  double mesh() const;
  std::size_t steps() const { return times.empty() ? 0 : times.size() - 1; }
};

/// Partition kinds: "uniform", "random_dyadic" (seeded sorted grid points),
/// and "adversarial_extrema" (anticipating: clusters half its points near the
/// path's running maxima, using full knowledge of W).
/// n is the nominal interval count; times run 0 .. T.
Partition partition_factory(const std::string& kind, int n, double total_time,
                            const DyadicPath* path, std::uint64_t seed);

struct SolveResult {
  Partition snapped;                  // partition after snap-to-grid
  std::vector<double> solution;       // (N+1) * d, x_0 = 0
  std::vector<double> drift_integral; // (N+1) * d, running sum of dt * f
  std::string drift_name;
  std::uint64_t path_seed = 0;
  int path_level = 0;
  int dim = 1;
  double max_snap_error = 0.0;
  std::string scheme = "euler";

  std::span<const double> state(std::size_t n) const {
    return {solution.data() + n * static_cast<std::size_t>(dim),
            static_cast<std::size_t>(dim)};
  }
};

/// Euler scheme x_{n+1} = x_n + W(t_{n+1}) - W(t_n) + (t_{n+1} - t_n) f(t_n, x_n)
/// with x_0 = 0. Partition times snap to the path grid; the largest snap
/// distance is recorded. T must not exceed 1 (use the BlockPath overload for
/// longer horizons).
SolveResult euler(const DyadicPath& path, const DriftField& f,
                  const Partition& partition);

/// Brownian path on [0, n_blocks] assembled from unit-interval dyadic paths
/// with per-block sub-seeds; blocks join continuously.
class BlockPath {
 public:
  BlockPath(std::uint64_t seed, int dim, int level, int n_blocks);

  int dim() const { return dim_; }
  int level() const { return level_; }
  std::uint64_t seed() const { return seed_; }
  int n_blocks() const { return static_cast<int>(blocks_.size()); }
  double total_time() const { return static_cast<double>(blocks_.size()); }

  std::size_t node_count() const;
  double time_of(std::size_t i) const;
  double node(std::size_t i, int coord) const;

 private:
  std::uint64_t seed_;
  int dim_;
  int level_;
  std::vector<DyadicPath> blocks_;
  std::vector<double> offsets_;  // W at integer times, n_blocks * dim
};

/// Euler over a multi-block path; supports partitions with T <= n_blocks.
SolveResult euler(const BlockPath& path, const DriftField& f,
                  const Partition& partition);

/// Recover the driving path from a solve: W'(t_n) = x_n - sum_{m<n} dt_m f(t_m, x_m),
/// with the drift sum recomputed by the same recursion the solver used, so the
/// round trip is exact up to one rounding of x_n - u_n per node.
std::vector<double> girsanov_transform(const SolveResult& result,
                                       const DriftField& f);

struct PerturbationResult {
  int grid_level = 0;
  std::vector<double> sup_norms;  // one per applied iterate
  int iterations = 0;
  bool converged = false;
  std::vector<double> final_u;                  // (2^n + 1) * d
  std::vector<std::vector<double>> iterates;    // kept when requested
};

/// Plain Picard iteration for the perturbation equation
///   u(t) = integral_0^t { f(s, W(s)+u(s)) - f(s, W(s)) } ds
/// by left-endpoint quadrature at grid_level. Stops when the sup-norm of the
/// iterate drops below tol or max_iter is reached; non-convergence is a
/// reported outcome, not an error.
/// u0 must be an admissible start: u0(0) = 0, sup-norm <= 1, Lipschitz-1 on
/// the grid.
PerturbationResult picard_uniqueness(const DyadicPath& path,
                                     const DriftField& f, int grid_level,
                                     std::span<const double> u0, int max_iter,
                                     double tol, bool store_iterates = false);

/// Seeded admissible start for uniqueness sweeps: a clamped Lipschitz-1
/// random walk from 0, Q-valued on the level-n grid.
std::vector<double> random_admissible_start(std::uint64_t seed, int index,
                                            int dim, int grid_level);

}  // namespace pathwise
