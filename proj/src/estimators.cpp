#include "pathwise/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pathwise/dyadic_path.hpp"
#include "pathwise/occupation.hpp"
#include "pathwise/parallel.hpp"
#include "pathwise/rng.hpp"
#include "pathwise/stats.hpp"

namespace pathwise {

namespace {

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::vector<double> axis_shift(double v, int dim) {
  std::vector<double> x(static_cast<std::size_t>(dim), 0.0);
  x[0] = v;
  return x;
}

void check_mc_args(int n_rep, int quad_level) {
  if (n_rep < 1) throw std::invalid_argument("estimator: n_rep must be >= 1");
  if (quad_level < 6 || quad_level > DyadicPath::kMaxLevel)
    throw std::invalid_argument("estimator: quadrature level outside [6, 24]");
}

EstimateSummary summarize(std::string experiment, std::uint64_t seed, int n_rep,
                          int quad_level, std::span<const double> values) {
  EstimateSummary out;
  out.experiment = std::move(experiment);
  out.base_seed = seed;
  out.n_rep = n_rep;
  out.quad_level = quad_level;
  const auto mv = stats::mean_variance(values);
  out.estimate = mv.mean;
  out.variance = mv.variance;
  out.ci_half = stats::ci_half_width_99(mv.variance, values.size());
  return out;
}

}  // namespace

std::vector<double> replica_rho_values(const ScalarField& g,
                                       std::span<const double> x, double a,
                                       double b, int n_rep, std::uint64_t seed,
                                       int quad_level, int workers) {
  check_mc_args(n_rep, quad_level);
  if (x.size() != static_cast<std::size_t>(g.dim()))
    throw std::invalid_argument("replica_rho_values: shift dimension mismatch");
  std::vector<double> shift(x.begin(), x.end());
  std::vector<double> vals(static_cast<std::size_t>(n_rep));
  parallel_for(static_cast<std::size_t>(n_rep), workers, [&](std::size_t i) {
    const auto path_seed = rng::derive_seed(seed, i, rng::kStreamReplica);
    const DyadicPath path = DyadicPath::generate(path_seed, g.dim(), quad_level);
    vals[i] = rho_window(path, g, a, b, shift, quad_level).value;
  });
  return vals;
}

std::vector<double> replica_field_integrals(const ScalarField& g, int n_rep,
                                            std::uint64_t seed, int quad_level,
                                            int workers) {
  check_mc_args(n_rep, quad_level);
  const std::size_t d = static_cast<std::size_t>(g.dim());
  std::vector<double> vals(static_cast<std::size_t>(n_rep));
  parallel_for(static_cast<std::size_t>(n_rep), workers, [&](std::size_t i) {
    const auto path_seed = rng::derive_seed(seed, i, rng::kStreamReplica);
    const DyadicPath path = DyadicPath::generate(path_seed, g.dim(), quad_level);
    const std::size_t cells = std::size_t{1} << quad_level;
    std::vector<double> buf(cells);
    for (std::size_t cell = 0; cell < cells; ++cell) {
      const double t = std::ldexp(static_cast<double>(cell), -quad_level);
      buf[cell] = g(t, path.node(cell).first(d));
    }
    vals[i] = std::ldexp(stats::tree_sum_pow2(buf), -quad_level);
  });
  return vals;
}

namespace {

EstimateSummary moment_from_rhos(const ScalarField& g,
                                 std::span<const double> rhos,
                                 std::span<const double> x, int p, int n_rep,
                                 std::uint64_t seed, int quad_level) {
  std::vector<double> powered(rhos.size());
  for (std::size_t i = 0; i < rhos.size(); ++i)
    powered[i] = std::pow(rhos[i], p);
  EstimateSummary out =
      summarize("moment_bound", seed, n_rep, quad_level, powered);
  const double xnorm = norm2(x);
  const double scale = stats::factorial(p / 2) * std::pow(xnorm, p);
  out.fitted_c = scale > 0.0
                     ? std::pow(std::max(out.estimate, 0.0) / scale,
                                1.0 / static_cast<double>(p))
                     : 0.0;
  EstimateCell cell;
  cell.params = {{"p", static_cast<double>(p)}, {"x", xnorm}};
  cell.estimate = out.estimate;
  cell.variance = out.variance;
  cell.ci_half = out.ci_half;
  cell.fitted_c = out.fitted_c;
  out.cells.push_back(std::move(cell));
  return out;
}

void check_moment_p(int p) {
  if (p % 2 != 0 || p < 2 || p > 8)
    throw std::invalid_argument(
        "moment order p must be an even integer in [2, 8]");
}

}  // namespace

EstimateSummary moment_bound(const ScalarField& g, std::span<const double> x,
                             int p, int n_rep, std::uint64_t seed,
                             int quad_level, int workers) {
  check_moment_p(p);
  if (norm2(x) > 1.0)
    throw std::invalid_argument("moment_bound: need |x| <= 1");
  const auto rhos =
      replica_rho_values(g, x, 0.0, 1.0, n_rep, seed, quad_level, workers);
  return moment_from_rhos(g, rhos, x, p, n_rep, seed, quad_level);
}

EstimateSummary constant_sweep(const ScalarField& g, int p,
                               std::span<const double> x_grid, int n_rep,
                               std::uint64_t seed, int quad_level,
                               int workers) {
  check_moment_p(p);
  if (x_grid.empty())
    throw std::invalid_argument("constant_sweep: empty shift grid");
  EstimateSummary out;
  out.experiment = "constant_sweep";
  out.base_seed = seed;
  out.n_rep = n_rep;
  out.quad_level = quad_level;
  double c_max = 0.0;
  for (double xv : x_grid) {
    const auto shift = axis_shift(xv, g.dim());
    const auto m =
        moment_bound(g, shift, p, n_rep, seed, quad_level, workers);
    EstimateCell cell = m.cells.front();
    cell.params["x"] = xv;
    out.cells.push_back(cell);
    c_max = std::max(c_max, cell.fitted_c);
  }
  out.fitted_c = c_max;
  out.estimate = c_max;
  // Strictly increasing fitted constants toward x -> 0 would contradict the
  // bound's |x|^p shape; surfaced as a failing envelope on the summary.
  bool monotone_growth = out.cells.size() >= 2;
  for (std::size_t i = 0; i + 1 < out.cells.size(); ++i)
    if (out.cells[i + 1].fitted_c <= out.cells[i].fitted_c)
      monotone_growth = false;
  out.all_pass = !monotone_growth;
  return out;
}

EstimateSummary tail_bound(const ScalarField& g, std::span<const double> x,
                           double a, double b,
                           std::span<const double> lambda_grid, int n_rep,
                           std::uint64_t seed, double c_hat, int quad_level,
                           int workers) {
  if (lambda_grid.empty())
    throw std::invalid_argument("tail_bound: empty lambda grid");
  if (c_hat <= 0.0)
    throw std::invalid_argument("tail_bound: fitted constant must be positive");
  const auto rhos =
      replica_rho_values(g, x, a, b, n_rep, seed, quad_level, workers);
  EstimateSummary out = summarize("tail_bound", seed, n_rep, quad_level, rhos);
  const double l = b - a;
  const double scale = std::sqrt(l) * norm2(x);
  const double slack_c = 1.2 * c_hat;
  out.fitted_c = c_hat;
  for (double lambda : lambda_grid) {
    const double threshold = lambda * scale;
    std::uint64_t count = 0;
    for (double r : rhos)
      if (std::fabs(r) >= threshold) ++count;
    const double freq =
        static_cast<double>(count) / static_cast<double>(n_rep);
    const auto cp = stats::clopper_pearson(count,
                                           static_cast<std::uint64_t>(n_rep),
                                           0.99);
    const double cp_half = 0.5 * (cp.hi - cp.lo);
    EstimateCell cell;
    cell.params = {{"lambda", lambda}, {"threshold", threshold}};
    cell.estimate = freq;
    cell.variance = freq * (1.0 - freq);
    cell.ci_half = cp_half;
    cell.fitted_c = c_hat;
    cell.envelope =
        2.0 * std::exp(-lambda * lambda / (2.0 * slack_c * slack_c)) +
        3.0 * cp_half;
    cell.has_envelope = true;
    cell.pass = freq <= cell.envelope;
    out.all_pass = out.all_pass && cell.pass;
    out.cells.push_back(std::move(cell));
  }
  return out;
}

EstimateSummary l2_functional_bound(const ScalarField& g, double p, int n_rep,
                                    std::uint64_t seed, int quad_level,
                                    int workers) {
  const double d = static_cast<double>(g.dim());
  if (!(p > 1.0 + d / 2.0))
    throw std::invalid_argument(
        "l2_functional_bound: hypothesis p > 1 + d/2 violated");
  if (!g.has_lp_norm())
    throw std::invalid_argument(
        "l2_functional_bound: field lacks an analytic L^p norm (not in L^p)");
  const auto integrals =
      replica_field_integrals(g, n_rep, seed, quad_level, workers);
  std::vector<double> squared(integrals.size());
  for (std::size_t i = 0; i < integrals.size(); ++i)
    squared[i] = integrals[i] * integrals[i];
  EstimateSummary out =
      summarize("l2_functional_bound", seed, n_rep, quad_level, squared);
  const double norm = g.lp_norm(p);
  EstimateCell cell;
  cell.params = {{"p", p}, {"lp_norm", norm}};
  cell.estimate = out.estimate;
  cell.variance = out.variance;
  cell.ci_half = out.ci_half;
  cell.fitted_c = norm > 0.0 ? out.estimate / (norm * norm) : 0.0;
  out.fitted_c = cell.fitted_c;
  out.cells.push_back(std::move(cell));
  return out;
}

std::vector<double> dyadic_shift_values() {
  return {0.5, 0.25, 0.0625, 0.00390625};  // 2^-1, 2^-2, 2^-4, 2^-8
}

std::vector<std::pair<double, double>> dyadic_shift_pairs() {
  return {{0.5, 0.25}, {0.25, 0.0}, {0.0625, 0.00390625}, {0.5, -0.5}};
}

EstimateSummary dyadic_modulus_sweep(const ScalarField& g,
                                     std::span<const int> n_grid, int n_rep,
                                     std::uint64_t seed, int quad_level,
                                     int workers) {
  if (n_grid.empty())
    throw std::invalid_argument("dyadic_modulus_sweep: empty n grid");
  for (int n : n_grid)
    if (n < 1 || n > 16)
      throw std::invalid_argument("dyadic_modulus_sweep: n outside [1, 16]");
  check_mc_args(n_rep, quad_level);

  const auto shifts = dyadic_shift_values();
  const auto pairs = dyadic_shift_pairs();
  // Every shift value that needs a sigma pass, including pair members.
  std::vector<double> all_shifts = shifts;
  for (const auto& [x, y] : pairs) {
    all_shifts.push_back(x);
    all_shifts.push_back(y);
  }
  std::sort(all_shifts.begin(), all_shifts.end());
  all_shifts.erase(std::unique(all_shifts.begin(), all_shifts.end()),
                   all_shifts.end());

  int max_n = 0;
  for (int n : n_grid) max_n = std::max(max_n, n);
  const int path_level = std::max(quad_level, max_n + 6);

  struct PerReplica {
    std::vector<double> rho_max;    // per n
    std::vector<double> sigma_max;  // per n
  };
  std::vector<PerReplica> per(static_cast<std::size_t>(n_rep));

  parallel_for(static_cast<std::size_t>(n_rep), workers, [&](std::size_t i) {
    const auto path_seed = rng::derive_seed(seed, i, rng::kStreamReplica);
    DyadicPath path = DyadicPath::generate(path_seed, g.dim(), path_level);
    auto& slot = per[i];
    slot.rho_max.assign(n_grid.size(), 0.0);
    slot.sigma_max.assign(n_grid.size(), 0.0);
    std::vector<std::vector<double>> sig_by_shift(all_shifts.size());
    for (std::size_t ni = 0; ni < n_grid.size(); ++ni) {
      const int n = n_grid[ni];
      const int lq = std::max(quad_level, n + 6);
      const std::uint64_t n_k = std::uint64_t{1} << n;
      for (std::size_t si = 0; si < all_shifts.size(); ++si) {
        auto& sig = sig_by_shift[si];
        sig.assign(static_cast<std::size_t>(n_k), 0.0);
        const auto shift = axis_shift(all_shifts[si], g.dim());
        if (all_shifts[si] == 0.0) continue;  // sigma(0) = 0 identically
        for (std::uint64_t k = 0; k < n_k; ++k)
          sig[static_cast<std::size_t>(k)] =
              sigma(path, g, {n, k}, shift, lq).value;
      }
      auto shift_slot = [&](double v) {
        return static_cast<std::size_t>(
            std::lower_bound(all_shifts.begin(), all_shifts.end(), v) -
            all_shifts.begin());
      };
      // sigma shape: |sigma_nk(x)| / (n^{1/2} 2^{-n/2} (|x| + 2^{-2^n}))
      const double tiny = std::exp2(-std::ldexp(1.0, n));
      for (double xv : shifts) {
        if (xv == 0.0) continue;
        const auto& sig = sig_by_shift[shift_slot(xv)];
        const double denom = std::sqrt(static_cast<double>(n)) *
                             std::sqrt(std::ldexp(1.0, -n)) *
                             (std::fabs(xv) + tiny);
        for (double v : sig)
          slot.sigma_max[ni] =
              std::max(slot.sigma_max[ni], std::fabs(v) / denom);
      }
      // rho shape: |rho_nk(x,y)| / (2^{-n/2} |x-y| (n^{1/2} + log+^{1/2}))
      for (const auto& [xv, yv] : pairs) {
        if (xv == yv) continue;
        const auto& sx = sig_by_shift[shift_slot(xv)];
        const auto& sy = sig_by_shift[shift_slot(yv)];
        const double dist = std::fabs(xv - yv);
        const double log_term =
            std::sqrt(std::max(0.0, std::log(1.0 / dist)));
        const double denom = std::sqrt(std::ldexp(1.0, -n)) * dist *
                             (std::sqrt(static_cast<double>(n)) + log_term);
        for (std::uint64_t k = 0; k < n_k; ++k) {
          const double r = sx[static_cast<std::size_t>(k)] -
                           sy[static_cast<std::size_t>(k)];
          slot.rho_max[ni] = std::max(slot.rho_max[ni], std::fabs(r) / denom);
        }
      }
    }
  });

  EstimateSummary out;
  out.experiment = "dyadic_modulus_sweep";
  out.base_seed = seed;
  out.n_rep = n_rep;
  out.quad_level = quad_level;
  double overall = 0.0;
  for (std::size_t ni = 0; ni < n_grid.size(); ++ni) {
    double rho_max = 0.0, sigma_max = 0.0;
    for (const auto& slot : per) {
      rho_max = std::max(rho_max, slot.rho_max[ni]);
      sigma_max = std::max(sigma_max, slot.sigma_max[ni]);
    }
    EstimateCell rc;
    rc.params = {{"n", static_cast<double>(n_grid[ni])}, {"stat", 0.0}};
    rc.estimate = rho_max;
    out.cells.push_back(rc);
    EstimateCell sc;
    sc.params = {{"n", static_cast<double>(n_grid[ni])}, {"stat", 1.0}};
    sc.estimate = sigma_max;
    out.cells.push_back(sc);
    overall = std::max({overall, rho_max, sigma_max});
  }
  out.estimate = overall;
  out.fitted_c = overall;
  return out;
}

}  // namespace pathwise
