#include "pathwise/solver.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "pathwise/rng.hpp"

namespace pathwise {

double Partition::mesh() const {
  if (times.size() < 2)
    throw std::invalid_argument("Partition: need at least two times");
  double m = 0.0;
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double gap = times[i] - times[i - 1];
    if (gap <= 0.0)
      throw std::invalid_argument("Partition: times must strictly increase");
    m = std::max(m, gap);
  }
  return m;
}

namespace {

Partition uniform_partition(int n, double total_time) {
  Partition p;
  p.times.resize(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i)
    p.times[static_cast<std::size_t>(i)] =
        total_time * static_cast<double>(i) / static_cast<double>(n);
  p.times.back() = total_time;
  return p;
}

Partition random_dyadic_partition(int n, double total_time,
                                  const DyadicPath* path, std::uint64_t seed) {
  const int level = path != nullptr ? path->level() : 14;
  const std::uint64_t grid =
      static_cast<std::uint64_t>(std::llround(std::ldexp(total_time, level)));
  if (grid < static_cast<std::uint64_t>(n))
    throw std::invalid_argument("random_dyadic: grid too coarse for n points");
  std::set<std::uint64_t> interior;
  std::uint64_t draw = 0;
  while (interior.size() < static_cast<std::size_t>(n) - 1) {
    const double u = rng::uniform_at(seed, draw++, rng::kStreamPartition);
    const std::uint64_t idx =
        1 + static_cast<std::uint64_t>(u * static_cast<double>(grid - 1));
    if (idx < grid) interior.insert(idx);
  }
  Partition p;
  p.times.reserve(static_cast<std::size_t>(n) + 1);
  p.times.push_back(0.0);
  for (std::uint64_t idx : interior)
    p.times.push_back(std::ldexp(static_cast<double>(idx), -level));
  p.times.push_back(total_time);
  return p;
}

// Clusters half the points on the grid nodes where the first coordinate sets
// a new running maximum; anticipating by construction.
Partition adversarial_partition(int n, double total_time,
                                const DyadicPath* path) {
  if (path == nullptr)
    throw std::invalid_argument(
        "adversarial_extrema: needs the path it anticipates");
  if (total_time != 1.0)
    throw std::invalid_argument("adversarial_extrema: built on [0,1] only");
  const int half = std::max(1, n / 2);
  std::set<std::uint64_t> nodes;
  // Uniform backbone with n/2 intervals keeps the mesh at or below 2/n.
  const std::uint64_t grid = std::uint64_t{1} << path->level();
  for (int i = 0; i <= half; ++i)
    nodes.insert(static_cast<std::uint64_t>(
        std::llround(static_cast<double>(i) / half * static_cast<double>(grid))));
  // Record times of the running maximum of W_1, most recent first.
  std::vector<std::uint64_t> records;
  double running = 0.0;
  for (std::size_t i = 1; i < path->node_count(); ++i) {
    if (path->node(i, 0) > running) {
      running = path->node(i, 0);
      records.push_back(static_cast<std::uint64_t>(i));
    }
  }
  std::reverse(records.begin(), records.end());
  int added = 0;
  for (std::uint64_t idx : records) {
    if (added >= n - half) break;
    if (nodes.insert(idx).second) ++added;
  }
  // Pad next to the global argmax if the path had few records.
  const std::uint64_t anchor = records.empty() ? grid / 2 : records.front();
  for (std::uint64_t off = 1; added < n - half && off < grid; ++off) {
    if (anchor >= off && nodes.insert(anchor - off).second) ++added;
    if (added < n - half && anchor + off <= grid &&
        nodes.insert(anchor + off).second)
      ++added;
  }
  Partition p;
  p.times.reserve(nodes.size());
  for (std::uint64_t idx : nodes)
    p.times.push_back(std::ldexp(static_cast<double>(idx), -path->level()));
  return p;
}

}  // namespace

Partition partition_factory(const std::string& kind, int n, double total_time,
                            const DyadicPath* path, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("partition_factory: n must be >= 1");
  if (total_time <= 0.0)
    throw std::invalid_argument("partition_factory: T must be positive");
  if (kind == "uniform") return uniform_partition(n, total_time);
  if (kind == "random_dyadic")
    return random_dyadic_partition(n, total_time, path, seed);
  if (kind == "adversarial_extrema")
    return adversarial_partition(n, total_time, path);
  throw std::invalid_argument("partition_factory: unknown kind " + kind);
}

namespace {

/// Euler recursion shared by single and multi-block paths. The drift
/// accumulator u_n is carried explicitly and x_n = W(t_n) + u_n, so the
/// Girsanov transform can rebuild u_n bit-for-bit from the stored solution.
template <class PathView>
SolveResult euler_impl(const PathView& w, const DriftField& f,
                       const Partition& partition) {
  if (partition.times.size() < 2)
    throw std::invalid_argument("euler: empty partition");
  if (partition.times.front() != 0.0)
    throw std::invalid_argument("euler: partition must start at 0");
  if (f.dim() != w.dim())
    throw std::invalid_argument("euler: drift dimension mismatch");

  const int level = w.level();
  const std::size_t d = static_cast<std::size_t>(w.dim());
  const std::size_t n_steps = partition.times.size() - 1;

  SolveResult res;
  res.drift_name = f.name();
  res.path_seed = w.seed();
  res.path_level = level;
  res.dim = w.dim();

  // Snap times to the grid; off-grid Brownian values would silently mix
  // interpolation error into convergence studies.
  res.snapped.times.resize(partition.times.size());
  std::vector<std::size_t> node_index(partition.times.size());
  for (std::size_t i = 0; i < partition.times.size(); ++i) {
    const double t = partition.times[i];
    const auto idx = static_cast<long long>(std::llround(std::ldexp(t, level)));
    if (idx < 0 || static_cast<std::size_t>(idx) >= w.node_count())
      throw std::invalid_argument("euler: partition time outside the path span");
    const double snapped = std::ldexp(static_cast<double>(idx), -level);
    res.max_snap_error = std::max(res.max_snap_error, std::fabs(snapped - t));
    res.snapped.times[i] = snapped;
    node_index[i] = static_cast<std::size_t>(idx);
    if (i > 0 && node_index[i] <= node_index[i - 1])
      throw std::invalid_argument(
          "euler: partition collapses after snapping to the path grid");
  }

  res.solution.assign((n_steps + 1) * d, 0.0);
  res.drift_integral.assign((n_steps + 1) * d, 0.0);
  std::vector<double> u(d, 0.0), fout(d);
  for (std::size_t n = 0; n <= n_steps; ++n) {
    double* x_n = res.solution.data() + n * d;
    for (std::size_t c = 0; c < d; ++c) {
      res.drift_integral[n * d + c] = u[c];
      x_n[c] = w.node(node_index[n], static_cast<int>(c)) + u[c];
    }
    if (n == n_steps) break;
    const double dt = res.snapped.times[n + 1] - res.snapped.times[n];
    f(res.snapped.times[n], {x_n, d}, fout);
    for (std::size_t c = 0; c < d; ++c) u[c] += dt * fout[c];
  }
  return res;
}

struct SinglePathView {
  const DyadicPath& p;
  int dim() const { return p.dim(); }
  int level() const { return p.level(); }
  std::uint64_t seed() const { return p.seed(); }
  std::size_t node_count() const { return p.node_count(); }
  double node(std::size_t i, int c) const { return p.node(i, c); }
};

}  // namespace

SolveResult euler(const DyadicPath& path, const DriftField& f,
                  const Partition& partition) {
  if (!partition.times.empty() && partition.times.back() > 1.0)
    throw std::invalid_argument(
        "euler: T > 1 requires the block-concatenated path overload");
  return euler_impl(SinglePathView{path}, f, partition);
}

BlockPath::BlockPath(std::uint64_t seed, int dim, int level, int n_blocks)
    : seed_(seed), dim_(dim), level_(level) {
  if (n_blocks < 1)
    throw std::invalid_argument("BlockPath: need at least one block");
  blocks_.reserve(static_cast<std::size_t>(n_blocks));
  offsets_.assign(static_cast<std::size_t>(n_blocks) * dim, 0.0);
  for (int m = 0; m < n_blocks; ++m) {
    blocks_.push_back(DyadicPath::generate(
        rng::derive_seed(seed, static_cast<std::uint64_t>(m), rng::kStreamBlock),
        dim, level));
    if (m + 1 < n_blocks) {
      const auto& blk = blocks_.back();
      const auto end = blk.node(blk.node_count() - 1);
      for (int c = 0; c < dim; ++c)
        offsets_[static_cast<std::size_t>(m + 1) * dim + c] =
            offsets_[static_cast<std::size_t>(m) * dim + c] + end[c];
    }
  }
}

std::size_t BlockPath::node_count() const {
  return blocks_.size() * (std::size_t{1} << level_) + 1;
}

double BlockPath::time_of(std::size_t i) const {
  return std::ldexp(static_cast<double>(i), -level_);
}

double BlockPath::node(std::size_t i, int coord) const {
  const std::size_t per_block = std::size_t{1} << level_;
  std::size_t m = i >> level_;
  if (m >= blocks_.size()) m = blocks_.size() - 1;
  const std::size_t local = i - m * per_block;
  return offsets_[m * static_cast<std::size_t>(dim_) + coord] +
         blocks_[m].node(local, coord);
}

SolveResult euler(const BlockPath& path, const DriftField& f,
                  const Partition& partition) {
  if (!partition.times.empty() && partition.times.back() > path.total_time())
    throw std::invalid_argument("euler: partition exceeds the block span");
  SolveResult res = euler_impl(path, f, partition);
  res.scheme = "euler_blocks";
  return res;
}

std::vector<double> girsanov_transform(const SolveResult& result,
                                       const DriftField& f) {
  const std::size_t d = static_cast<std::size_t>(result.dim);
  const std::size_t n_times = result.snapped.times.size();
  if (result.solution.size() != n_times * d)
    throw std::invalid_argument("girsanov_transform: malformed solve result");
  std::vector<double> w(n_times * d, 0.0);
  std::vector<double> u(d, 0.0), fout(d);
  for (std::size_t n = 0; n < n_times; ++n) {
    const double* x_n = result.solution.data() + n * d;
    for (std::size_t c = 0; c < d; ++c) w[n * d + c] = x_n[c] - u[c];
    if (n + 1 == n_times) break;
    const double dt = result.snapped.times[n + 1] - result.snapped.times[n];
    f(result.snapped.times[n], {x_n, d}, fout);
    for (std::size_t c = 0; c < d; ++c) u[c] += dt * fout[c];
  }
  return w;
}

namespace {

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

PerturbationResult picard_uniqueness(const DyadicPath& path,
                                     const DriftField& f, int grid_level,
                                     std::span<const double> u0, int max_iter,
                                     double tol, bool store_iterates) {
  if (grid_level < 0 || grid_level > path.level())
    throw std::invalid_argument(
        "picard_uniqueness: grid level outside the path's resolution");
  if (max_iter < 1)
    throw std::invalid_argument("picard_uniqueness: max_iter must be >= 1");
  if (tol <= 0.0)
    throw std::invalid_argument("picard_uniqueness: tol must be positive");
  const std::size_t d = static_cast<std::size_t>(path.dim());
  const std::size_t n_nodes = (std::size_t{1} << grid_level) + 1;
  if (u0.size() != n_nodes * d)
    throw std::invalid_argument("picard_uniqueness: u0 has wrong grid size");
  if (norm2(u0.first(d)) != 0.0)
    throw std::invalid_argument("picard_uniqueness: u0(0) must be 0");
  const double h = std::ldexp(1.0, -grid_level);
  for (std::size_t i = 0; i < n_nodes; ++i) {
    for (std::size_t c = 0; c < d; ++c)
      if (std::fabs(u0[i * d + c]) > 1.0 + 1e-12)
        throw std::invalid_argument("picard_uniqueness: u0 must be Q-valued");
    if (i > 0) {
      double step = 0.0;
      for (std::size_t c = 0; c < d; ++c) {
        const double diff = u0[i * d + c] - u0[(i - 1) * d + c];
        step += diff * diff;
      }
      if (std::sqrt(step) > h * (1.0 + 1e-9))
        throw std::invalid_argument(
            "picard_uniqueness: u0 must be Lipschitz-1 on the grid");
    }
  }

  const int stride_shift = path.level() - grid_level;
  PerturbationResult res;
  res.grid_level = grid_level;

  std::vector<double> u(u0.begin(), u0.end());
  std::vector<double> next(n_nodes * d, 0.0);
  std::vector<double> shifted(d), fu(d), f0(d), acc(d);
  for (int it = 0; it < max_iter; ++it) {
    std::fill(acc.begin(), acc.end(), 0.0);
    std::fill(next.begin(), next.begin() + static_cast<std::ptrdiff_t>(d), 0.0);
    double sup = 0.0;
    for (std::size_t k = 0; k + 1 < n_nodes; ++k) {
      const double t = std::ldexp(static_cast<double>(k), -grid_level);
      const auto w = path.node(k << stride_shift);
      for (std::size_t c = 0; c < d; ++c) shifted[c] = w[c] + u[k * d + c];
      f(t, shifted, fu);
      f(t, w, f0);
      for (std::size_t c = 0; c < d; ++c) {
        acc[c] += h * (fu[c] - f0[c]);
        next[(k + 1) * d + c] = acc[c];
      }
      sup = std::max(sup, norm2({next.data() + (k + 1) * d, d}));
    }
    u = next;
    res.sup_norms.push_back(sup);
    res.iterations = it + 1;
    if (store_iterates) res.iterates.push_back(u);
    if (sup < tol) {
      res.converged = true;
      break;
    }
  }
  res.final_u = std::move(u);
  return res;
}

std::vector<double> random_admissible_start(std::uint64_t seed, int index,
                                            int dim, int grid_level) {
  const std::uint64_t stream = rng::derive_seed(
      seed, static_cast<std::uint64_t>(index), rng::kStreamStart);
  const std::size_t d = static_cast<std::size_t>(dim);
  const std::size_t n_nodes = (std::size_t{1} << grid_level) + 1;
  const double h = std::ldexp(1.0, -grid_level);
  const double coord_step = h / std::sqrt(static_cast<double>(dim));
  std::vector<double> u(n_nodes * d, 0.0);
  for (std::size_t k = 1; k < n_nodes; ++k) {
    for (std::size_t c = 0; c < d; ++c) {
      const double uni =
          rng::uniform_at(stream, k, static_cast<std::uint32_t>(c));
      const double step = (2.0 * uni - 1.0) * coord_step;
      u[k * d + c] =
          std::clamp(u[(k - 1) * d + c] + step, -1.0, 1.0);
    }
  }
  return u;
}

}  // namespace pathwise
