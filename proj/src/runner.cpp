#include "pathwise/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include "json.hpp"
#include "pathwise/dyadic_path.hpp"
#include "pathwise/estimators.hpp"
#include "pathwise/fields.hpp"
#include "pathwise/kernel_lab.hpp"
#include "pathwise/occupation.hpp"
#include "pathwise/parallel.hpp"
#include "pathwise/rng.hpp"
#include "pathwise/solver.hpp"
#include "pathwise/stats.hpp"

namespace pathwise::runner {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt(int v) { return std::to_string(v); }
std::string fmt(std::uint64_t v) { return std::to_string(v); }

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header) {
    append_row(header);
  }

  void append_row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) body_ += ',';
      body_ += cells[i];
    }
    body_ += '\n';
  }

  fs::path write(const fs::path& file) const {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    out << body_;
    return file;
  }

 private:
  std::string body_;
};

void emit_gnuplot_script(const fs::path& csv, int x_col, int y_col,
                         const std::string& title) {
  fs::path gp = csv;
  gp.replace_extension(".gp");
  std::ofstream out(gp);
  out << "set datafile separator ','\n"
      << "set key autotitle columnhead\n"
      << "set title '" << title << "'\n"
      << "plot '" << csv.filename().string() << "' using " << x_col << ":"
      << y_col << " with linespoints\n";
}

std::pair<std::string, int> parse_partition_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos)
    throw ConfigError("partition spec must be kind:N, got " + spec);
  const std::string kind = spec.substr(0, colon);
  int n = 0;
  try {
    n = std::stoi(spec.substr(colon + 1));
  } catch (const std::exception&) {
    throw ConfigError("bad interval count in partition spec " + spec);
  }
  if (kind != "uniform" && kind != "random_dyadic" &&
      kind != "adversarial_extrema")
    throw ConfigError("unknown partition kind " + kind);
  if (n < 1) throw ConfigError("partition needs at least one interval");
  return {kind, n};
}

const std::set<std::string>& known_experiments() {
  static const std::set<std::string> kNames = {
      "paths", "moments", "constants", "tails",   "l2",    "dyadic",
      "euler", "uniqueness", "chain",  "kernels", "words", "all"};
  return kNames;
}

ScalarField cfg_scalar(const RunConfig& cfg) {
  return scalar_field(cfg.field, cfg.dim);
}

DriftField cfg_drift(const RunConfig& cfg) {
  return drift_field(cfg.field, cfg.dim);
}

// ---------------------------------------------------------------------------
// words
// ---------------------------------------------------------------------------

bool even_subset_bijection_holds(int k) {
  const auto words = allowed_words(k);
  std::set<std::uint64_t> masks;
  for (const auto& w : words) {
    std::uint64_t mask = 0;
    for (int pos : w.ed_positions()) mask |= std::uint64_t{1} << pos;
    if (w.ed_positions().size() % 2 != 0) return false;
    if (!masks.insert(mask).second) return false;  // subset hit twice
  }
  return masks.size() == (std::uint64_t{1} << (k - 1));
}

ExperimentResult run_words(const RunConfig& cfg) {
  ExperimentResult res;
  res.name = "words";
  CsvWriter csv({"experiment", "k", "count", "expected", "bijection_ok",
                 "pass"});
  std::uint64_t last_count = 0;
  for (int k = 1; k <= cfg.words_k; ++k) {
    const auto words = allowed_words(k);
    const std::uint64_t expected = std::uint64_t{1} << (k - 1);
    const bool bijection = even_subset_bijection_holds(k);
    const bool pass = words.size() == expected && bijection;
    res.pass = res.pass && pass;
    last_count = words.size();
    csv.append_row({"words", fmt(k), fmt(std::uint64_t{words.size()}),
                    fmt(expected), bijection ? "1" : "0", pass ? "1" : "0"});
  }
  res.metrics["count_at_k"] = static_cast<double>(last_count);
  res.detail = "allowed words up to k=" + std::to_string(cfg.words_k) +
               ", count at top k = " + std::to_string(last_count);
  if (cfg.emit_csv)
    res.artifacts.push_back(csv.write(fs::path(cfg.out_dir) / "words.csv"));
  return res;
}

// ---------------------------------------------------------------------------
// kernels
// ---------------------------------------------------------------------------

ExperimentResult run_kernels(const RunConfig& cfg) {
  ExperimentResult res;
  res.name = "kernels";
  CsvWriter csv({"experiment", "kernel", "t", "mass", "scaled_mass", "pass"});
  const std::vector<double> t_grid = {0.01, 0.25, 1.0};
  const double b_target = std::sqrt(2.0 / std::numbers::pi);
  std::vector<double> d_scaled;
  bool pass = true;
  for (double t : t_grid) {
    const double e_mass = kernel_l1_mass(Kernel::E, t);
    const bool e_ok = std::fabs(e_mass - 1.0) <= 1e-8;
    csv.append_row({"kernels", "E", fmt(t), fmt(e_mass), fmt(e_mass),
                    e_ok ? "1" : "0"});
    const double b_mass = kernel_l1_mass(Kernel::B, t);
    const double b_scaled = std::sqrt(t) * b_mass;
    const bool b_ok = std::fabs(b_scaled - b_target) <= 1e-6;
    csv.append_row({"kernels", "B", fmt(t), fmt(b_mass), fmt(b_scaled),
                    b_ok ? "1" : "0"});
    const double d_mass = kernel_l1_mass(Kernel::D, t);
    d_scaled.push_back(t * d_mass);
    csv.append_row({"kernels", "D", fmt(t), fmt(d_mass), fmt(d_scaled.back()),
                    "1"});
    pass = pass && e_ok && b_ok;
  }
  const auto [d_min, d_max] =
      std::minmax_element(d_scaled.begin(), d_scaled.end());
  const bool d_const = (*d_max - *d_min) <= 1e-6;
  pass = pass && d_const;
  res.pass = pass;
  res.metrics["d_scaled_spread"] = *d_max - *d_min;
  res.detail = "kernel masses: t*int|D| spread " + fmt(*d_max - *d_min);
  if (cfg.emit_csv) {
    const auto file = csv.write(fs::path(cfg.out_dir) / "kernels.csv");
    res.artifacts.push_back(file);
    if (cfg.emit_gnuplot) emit_gnuplot_script(file, 3, 5, "kernel L1 masses");
  }
  return res;
}

// ---------------------------------------------------------------------------
// paths
// ---------------------------------------------------------------------------

ExperimentResult run_paths(const RunConfig& cfg) {
  ExperimentResult res;
  res.name = "paths";
  const DyadicPath path = DyadicPath::generate(cfg.seed, cfg.dim, cfg.level);
  std::vector<std::string> header = {"experiment", "seed", "level", "node",
                                     "t"};
  for (int c = 0; c < cfg.dim; ++c) header.push_back("w_" + std::to_string(c));
  CsvWriter csv(header);
  for (std::size_t i = 0; i < path.node_count(); ++i) {
    std::vector<std::string> row = {"paths", fmt(cfg.seed), fmt(cfg.level),
                                    fmt(std::uint64_t{i}), fmt(path.time_of(i))};
    for (int c = 0; c < cfg.dim; ++c) row.push_back(fmt(path.node(i, c)));
    csv.append_row(row);
  }
  // Envelope: level-L increments of coordinate 0 have variance near 2^-L.
  std::vector<double> inc(path.node_count() - 1);
  for (std::size_t i = 0; i + 1 < path.node_count(); ++i)
    inc[i] = path.node(i + 1, 0) - path.node(i, 0);
  const auto mv = stats::mean_variance(inc);
  const double unit = std::ldexp(1.0, -cfg.level);
  res.pass = mv.variance >= 0.8 * unit && mv.variance <= 1.2 * unit;
  res.metrics["increment_variance_ratio"] = mv.variance / unit;
  res.detail = "increment variance ratio " + fmt(mv.variance / unit);
  if (cfg.emit_csv) {
    const auto file = csv.write(fs::path(cfg.out_dir) / "paths.csv");
    res.artifacts.push_back(file);
    if (cfg.emit_gnuplot) emit_gnuplot_script(file, 5, 6, "dyadic path");
  }
  if (cfg.emit_binary_path) {
    const fs::path bin = fs::path(cfg.out_dir) / "path.bin";
    std::ofstream out(bin, std::ios::binary);
    path.dump(out);
    res.artifacts.push_back(bin);
  }
  return res;
}

// ---------------------------------------------------------------------------
// moments
// ---------------------------------------------------------------------------

ExperimentResult run_moments(const RunConfig& cfg) {
  ExperimentResult res;
  res.name = "moments";
  const ScalarField g = cfg_scalar(cfg);
  CsvWriter csv({"experiment", "seed", "quad_level", "field", "x", "p",
                 "n_rep", "estimate", "variance", "ci_half", "fitted_c",
                 "envelope", "pass"});
  double worst_ratio = 0.0;
  for (double xv : cfg.x_grid) {
    std::vector<double> shift(static_cast<std::size_t>(cfg.dim), 0.0);
    shift[0] = xv;
    const auto rhos = replica_rho_values(g, shift, 0.0, 1.0, cfg.n_rep,
                                         cfg.seed, cfg.quad_level, cfg.workers);
    double c2 = 0.0;
    std::vector<EstimateCell> cells;
    for (int p : cfg.p_grid) {
      std::vector<double> powered(rhos.size());
      for (std::size_t i = 0; i < rhos.size(); ++i)
        powered[i] = std::pow(rhos[i], p);
      const auto mv = stats::mean_variance(powered);
      const double scale =
          stats::factorial(p / 2) * std::pow(std::fabs(xv), p);
      const double fitted =
          scale > 0.0 ? std::pow(std::max(mv.mean, 0.0) / scale,
                                 1.0 / static_cast<double>(p))
                      : 0.0;
      if (p == 2) c2 = fitted;
      EstimateCell cell;
      cell.params = {{"x", xv}, {"p", static_cast<double>(p)}};
      cell.estimate = mv.mean;
      cell.variance = mv.variance;
      cell.ci_half = stats::ci_half_width_99(mv.variance, powered.size());
      cell.fitted_c = fitted;
      cells.push_back(std::move(cell));
    }
    for (auto& cell : cells) {
      const int p = static_cast<int>(cell.params["p"]);
      if (p > 2 && c2 > 0.0) {
        cell.has_envelope = true;
        cell.envelope = 1.5 * c2;
        cell.pass = cell.fitted_c <= cell.envelope;
        worst_ratio = std::max(worst_ratio, cell.fitted_c / c2);
      }
      res.pass = res.pass && cell.pass;
      csv.append_row({"moments", fmt(cfg.seed), fmt(cfg.quad_level), g.name(),
                      fmt(xv), fmt(p), fmt(cfg.n_rep), fmt(cell.estimate),
                      fmt(cell.variance), fmt(cell.ci_half),
                      fmt(cell.fitted_c),
                      cell.has_envelope ? fmt(cell.envelope) : "",
                      cell.pass ? "1" : "0"});
    }
  }
  res.metrics["worst_ratio_vs_c2"] = worst_ratio;
  res.detail = "max fitted-C ratio vs p=2: " + fmt(worst_ratio);
  if (cfg.emit_csv) {
    const auto file = csv.write(fs::path(cfg.out_dir) / "moments.csv");
    res.artifacts.push_back(file);
    if (cfg.emit_gnuplot) emit_gnuplot_script(file, 6, 11, "moment constants");
  }
  return res;
}

// ---------------------------------------------------------------------------
// constants
// ---------------------------------------------------------------------------

ExperimentResult run_constants(const RunConfig& cfg) {
  ExperimentResult res;
  res.name = "constants";
  const ScalarField g = cfg_scalar(cfg);
  const auto sweep = constant_sweep(g, cfg.p, cfg.x_grid, cfg.n_rep, cfg.seed,
                                    cfg.quad_level, cfg.workers);
  CsvWriter csv({"experiment", "seed", "quad_level", "field", "p", "x",
                 "n_rep", "estimate", "variance", "ci_half", "fitted_c",
                 "pass"});
  double c_min = std::numeric_limits<double>::infinity();
  double c_max = 0.0;
  for (const auto& cell : sweep.cells) {
    if (cell.fitted_c > 0.0) {
      c_min = std::min(c_min, cell.fitted_c);
      c_max = std::max(c_max, cell.fitted_c);
    }
  }
  const bool ratio_ok =
      c_max == 0.0 || (std::isfinite(c_min) && c_max <= 3.0 * c_min);
  res.pass = sweep.all_pass && ratio_ok;
  for (const auto& cell : sweep.cells)
    csv.append_row({"constants", fmt(cfg.seed), fmt(cfg.quad_level), g.name(),
                    fmt(cfg.p), fmt(cell.params.at("x")), fmt(cfg.n_rep),
                    fmt(cell.estimate), fmt(cell.variance), fmt(cell.ci_half),
                    fmt(cell.fitted_c), res.pass ? "1" : "0"});
  res.metrics["c_hat_max"] = c_max;
  res.metrics["c_hat_ratio"] = c_min > 0.0 ? c_max / c_min : 0.0;
  res.detail = "fitted-C spread max/min = " +
               fmt(c_min > 0.0 ? c_max / c_min : 0.0);
  if (cfg.emit_csv) {
    const auto file = csv.write(fs::path(cfg.out_dir) / "constants.csv");
    res.artifacts.push_back(file);
    if (cfg.emit_gnuplot) emit_gnuplot_script(file, 6, 11, "constant sweep");
  }
  return res;
}

// ---------------------------------------------------------------------------
// tails
// ---------------------------------------------------------------------------

ExperimentResult run_tails(const RunConfig& cfg) {
  ExperimentResult res;
  res.name = "tails";
  const ScalarField g = cfg_scalar(cfg);
  const double xv = cfg.x_grid.empty() ? 0.1 : cfg.x_grid.front();
  std::vector<double> shift(static_cast<std::size_t>(cfg.dim), 0.0);
  shift[0] = xv;
  const auto fit = moment_bound(g, shift, 2, std::min(cfg.n_rep, 10000),
                                cfg.seed, cfg.quad_level, cfg.workers);
  const double c_hat = std::max(fit.fitted_c, 1e-12);
  const auto tails = tail_bound(g, shift, 0.0, 1.0, cfg.lambda_grid, cfg.n_rep,
                                cfg.seed, c_hat, cfg.quad_level, cfg.workers);
  CsvWriter csv({"experiment", "seed", "quad_level", "field", "x", "lambda",
                 "n_rep", "frequency", "cp_half", "envelope", "fitted_c",
                 "pass"});
  for (const auto& cell : tails.cells) {
    res.pass = res.pass && cell.pass;
    csv.append_row({"tails", fmt(cfg.seed), fmt(cfg.quad_level), g.name(),
                    fmt(xv), fmt(cell.params.at("lambda")), fmt(cfg.n_rep),
                    fmt(cell.estimate), fmt(cell.ci_half), fmt(cell.envelope),
                    fmt(c_hat), cell.pass ? "1" : "0"});
  }
  res.metrics["c_hat"] = c_hat;
  res.detail = "sub-Gaussian envelope with fitted C = " + fmt(c_hat);
  if (cfg.emit_csv) {
    const auto file = csv.write(fs::path(cfg.out_dir) / "tails.csv");
    res.artifacts.push_back(file);
    if (cfg.emit_gnuplot)
      emit_gnuplot_script(file, 6, 8, "tail exceedance vs envelope");
  }
  return res;
}

// ---------------------------------------------------------------------------
// l2
// ---------------------------------------------------------------------------

ExperimentResult run_l2(const RunConfig& cfg) {
  ExperimentResult res;
  res.name = "l2";
  const ScalarField g = cfg_scalar(cfg);
  EstimateSummary sum;
  try {
    sum = l2_functional_bound(g, cfg.lp, cfg.n_rep, cfg.seed, cfg.quad_level,
                              cfg.workers);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  CsvWriter csv({"experiment", "seed", "quad_level", "field", "p", "n_rep",
                 "estimate", "variance", "ci_half", "lp_norm", "ratio"});
  const auto& cell = sum.cells.front();
  csv.append_row({"l2", fmt(cfg.seed), fmt(cfg.quad_level), g.name(),
                  fmt(cfg.lp), fmt(cfg.n_rep), fmt(cell.estimate),
                  fmt(cell.variance), fmt(cell.ci_half),
                  fmt(cell.params.at("lp_norm")), fmt(cell.fitted_c)});
  res.metrics["ratio"] = cell.fitted_c;
  res.detail = "E[(int g)^2] / ||g||_p^2 = " + fmt(cell.fitted_c);
  if (cfg.emit_csv)
    res.artifacts.push_back(csv.write(fs::path(cfg.out_dir) / "l2.csv"));
  return res;
}

// ---------------------------------------------------------------------------
// dyadic
// ---------------------------------------------------------------------------

ExperimentResult run_dyadic(const RunConfig& cfg) {
  ExperimentResult res;
  res.name = "dyadic";
  const ScalarField g = cfg_scalar(cfg);
  const auto sweep = dyadic_modulus_sweep(g, cfg.n_grid, cfg.n_rep, cfg.seed,
                                          cfg.quad_level, cfg.workers);
  CsvWriter csv({"experiment", "seed", "quad_level", "field", "n", "stat",
                 "n_rep", "normalized_max", "pass"});
  double rho_min = std::numeric_limits<double>::infinity(), rho_max = 0.0;
  double sig_min = std::numeric_limits<double>::infinity(), sig_max = 0.0;
  for (const auto& cell : sweep.cells) {
    const bool is_rho = cell.params.at("stat") == 0.0;
    if (is_rho) {
      rho_min = std::min(rho_min, cell.estimate);
      rho_max = std::max(rho_max, cell.estimate);
    } else {
      sig_min = std::min(sig_min, cell.estimate);
      sig_max = std::max(sig_max, cell.estimate);
    }
  }
  const bool flat = rho_max <= 3.0 * rho_min && sig_max <= 3.0 * sig_min;
  const bool ceiling = sweep.fitted_c <= baselines::kDyadicCeiling;
  res.pass = flat && ceiling;
  for (const auto& cell : sweep.cells)
    csv.append_row({"dyadic", fmt(cfg.seed), fmt(cfg.quad_level), g.name(),
                    fmt(static_cast<int>(cell.params.at("n"))),
                    cell.params.at("stat") == 0.0 ? "rho" : "sigma",
                    fmt(cfg.n_rep), fmt(cell.estimate),
                    res.pass ? "1" : "0"});
  res.metrics["c_dyadic"] = sweep.fitted_c;
  res.metrics["rho_flatness"] = rho_min > 0.0 ? rho_max / rho_min : 0.0;
  res.metrics["sigma_flatness"] = sig_min > 0.0 ? sig_max / sig_min : 0.0;
  res.detail = "C_dyadic = " + fmt(sweep.fitted_c);
  if (cfg.emit_csv) {
    const auto file = csv.write(fs::path(cfg.out_dir) / "dyadic.csv");
    res.artifacts.push_back(file);
    if (cfg.emit_gnuplot)
      emit_gnuplot_script(file, 5, 8, "dyadic modulus maxima");
  }
  return res;
}

// ---------------------------------------------------------------------------
// euler
// ---------------------------------------------------------------------------

double sup_u_error_vs_reference(const SolveResult& run,
                                const SolveResult& ref) {
  // Both partitions live on the same path grid; compare drift parts at the
  // run's times through the reference's exact nodes.
  const std::size_t d = static_cast<std::size_t>(run.dim);
  const double ref_h = ref.snapped.times[1] - ref.snapped.times[0];
  double sup = 0.0;
  for (std::size_t i = 0; i < run.snapped.times.size(); ++i) {
    const double t = run.snapped.times[i];
    const std::size_t j =
        static_cast<std::size_t>(std::llround(t / ref_h));
    double err2 = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      const double diff = run.drift_integral[i * d + c] -
                          ref.drift_integral[j * d + c];
      err2 += diff * diff;
    }
    sup = std::max(sup, std::sqrt(err2));
  }
  return sup;
}

// Mutual sup-distance of the drift parts over the union of the two time
// grids; u is Lipschitz-1 so linear interpolation between a partition's own
// nodes adds at most one mesh of error.
double mutual_u_distance(const SolveResult& a, const SolveResult& b) {
  const std::size_t d = static_cast<std::size_t>(a.dim);
  auto interp = [&](const SolveResult& r, double t, std::span<double> out) {
    const auto& times = r.snapped.times;
    const auto it = std::lower_bound(times.begin(), times.end(), t);
    std::size_t hi = static_cast<std::size_t>(it - times.begin());
    if (hi == 0) hi = 1;
    if (hi >= times.size()) hi = times.size() - 1;
    const std::size_t lo = hi - 1;
    const double w =
        (t - times[lo]) / (times[hi] - times[lo]);
    for (std::size_t c = 0; c < d; ++c)
      out[c] = r.drift_integral[lo * d + c] +
               w * (r.drift_integral[hi * d + c] -
                    r.drift_integral[lo * d + c]);
  };
  std::vector<double> grid = a.snapped.times;
  grid.insert(grid.end(), b.snapped.times.begin(), b.snapped.times.end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  std::vector<double> ua(d), ub(d);
  double sup = 0.0;
  for (double t : grid) {
    interp(a, t, ua);
    interp(b, t, ub);
    double err2 = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      const double diff = ua[c] - ub[c];
      err2 += diff * diff;
    }
    sup = std::max(sup, std::sqrt(err2));
  }
  return sup;
}

double girsanov_roundtrip_error(const SolveResult& run, const DriftField& f,
                                const DyadicPath& path) {
  const auto w = girsanov_transform(run, f);
  const std::size_t d = static_cast<std::size_t>(run.dim);
  double sup = 0.0;
  for (std::size_t i = 0; i < run.snapped.times.size(); ++i) {
    const auto idx = static_cast<std::size_t>(
        std::llround(std::ldexp(run.snapped.times[i], path.level())));
    for (std::size_t c = 0; c < d; ++c)
      sup = std::max(sup,
                     std::fabs(w[i * d + c] - path.node(idx, static_cast<int>(c))));
  }
  return sup;
}

ExperimentResult run_euler(const RunConfig& cfg) {
  ExperimentResult res;
  res.name = "euler";
  const int ref_level = std::max(cfg.level, 16);
  DyadicPath path = DyadicPath::generate(cfg.seed, cfg.dim, ref_level);
  path.freeze();
  const DriftField f = cfg_drift(cfg);
  CsvWriter csv({"experiment", "seed", "ref_level", "drift", "kind",
                 "n_intervals", "mesh", "snap_error", "sup_error",
                 "girsanov_error", "pass"});

  const int ref_n = 1 << ref_level;
  const SolveResult ref =
      euler(path, f, partition_factory("uniform", ref_n, 1.0, &path, cfg.seed));

  // Uniform mesh-doubling study.
  std::vector<double> errors;
  bool pass = true;
  for (int exp2 = 6; exp2 <= 14; ++exp2) {
    const int n = 1 << exp2;
    const auto part = partition_factory("uniform", n, 1.0, &path, cfg.seed);
    const auto run = euler(path, f, part);
    const double err = sup_u_error_vs_reference(run, ref);
    const double g_err = girsanov_roundtrip_error(run, f, path);
    errors.push_back(err);
    pass = pass && g_err <= 1e-12;
    csv.append_row({"euler", fmt(cfg.seed), fmt(ref_level), f.name(),
                    "uniform", fmt(n), fmt(run.snapped.mesh()),
                    fmt(run.max_snap_error), fmt(err), fmt(g_err),
                    g_err <= 1e-12 ? "1" : "0"});
  }
  // Non-increasing trend, one inversion allowed within 2x slack; final below
  // the frozen regression threshold.
  int inversions = 0;
  for (std::size_t i = 1; i < errors.size(); ++i) {
    if (errors[i] > errors[i - 1]) {
      ++inversions;
      if (errors[i] > 2.0 * errors[i - 1]) pass = false;
    }
  }
  if (inversions > 1) pass = false;
  if (errors.back() >= baselines::kEulerRegressionThreshold) pass = false;

  // Partition independence at matched mesh order.
  const auto [kind_sel, n_sel] = parse_partition_spec(cfg.partition);
  const int n_match = std::max(64, n_sel);
  std::vector<SolveResult> runs;
  std::vector<std::string> kinds = {"uniform", "random_dyadic",
                                    "adversarial_extrema"};
  double finest_self = std::numeric_limits<double>::infinity();
  double finest_mesh = std::numeric_limits<double>::infinity();
  for (const auto& kind : kinds) {
    const auto part = partition_factory(kind, n_match, 1.0, &path, cfg.seed);
    auto run = euler(path, f, part);
    const double err = sup_u_error_vs_reference(run, ref);
    const double g_err = girsanov_roundtrip_error(run, f, path);
    pass = pass && g_err <= 1e-12;
    if (run.snapped.mesh() < finest_mesh) {
      finest_mesh = run.snapped.mesh();
      finest_self = err;
    }
    csv.append_row({"euler", fmt(cfg.seed), fmt(ref_level), f.name(), kind,
                    fmt(n_match), fmt(run.snapped.mesh()),
                    fmt(run.max_snap_error), fmt(err), fmt(g_err),
                    g_err <= 1e-12 ? "1" : "0"});
    runs.push_back(std::move(run));
  }
  double worst_mutual = 0.0;
  for (std::size_t i = 0; i < runs.size(); ++i)
    for (std::size_t j = i + 1; j < runs.size(); ++j)
      worst_mutual = std::max(worst_mutual, mutual_u_distance(runs[i], runs[j]));
  if (worst_mutual > 4.0 * finest_self) pass = false;

  res.pass = pass;
  res.metrics["final_uniform_error"] = errors.back();
  res.metrics["worst_mutual_distance"] = worst_mutual;
  res.metrics["finest_self_error"] = finest_self;
  res.detail = "uniform error at N=2^14: " + fmt(errors.back()) +
               ", mutual: " + fmt(worst_mutual);
  if (cfg.emit_csv) {
    const auto file = csv.write(fs::path(cfg.out_dir) / "euler.csv");
    res.artifacts.push_back(file);
    if (cfg.emit_gnuplot)
      emit_gnuplot_script(file, 6, 9, "Euler convergence");
  }
  return res;
}

// ---------------------------------------------------------------------------
// uniqueness
// ---------------------------------------------------------------------------

ExperimentResult run_uniqueness(const RunConfig& cfg) {
  ExperimentResult res;
  res.name = "uniqueness";
  const DriftField f = cfg_drift(cfg);
  struct Row {
    int seed_index;
    int start_index;
    int iterations;
    double final_sup;
    bool converged;
  };
  const std::size_t total =
      static_cast<std::size_t>(cfg.n_seeds) * cfg.starts;
  std::vector<Row> rows(total);
  parallel_for(total, cfg.workers, [&](std::size_t idx) {
    const int s = static_cast<int>(idx) / cfg.starts;
    const int j = static_cast<int>(idx) % cfg.starts;
    const auto path_seed = rng::derive_seed(
        cfg.seed, static_cast<std::uint64_t>(s), rng::kStreamSeedSweep);
    const DyadicPath path =
        DyadicPath::generate(path_seed, cfg.dim, cfg.level);
    const auto u0 =
        random_admissible_start(path_seed, j, cfg.dim, cfg.level);
    const auto out = picard_uniqueness(path, f, cfg.level, u0, cfg.max_iter,
                                       cfg.tol);
    const double final_sup =
        out.sup_norms.empty() ? 0.0 : out.sup_norms.back();
    rows[idx] = {s, j, out.iterations, final_sup, out.converged};
  });
  CsvWriter csv({"experiment", "base_seed", "level", "drift", "seed_index",
                 "start_index", "iterations", "final_sup", "converged"});
  int worst_iters = 0;
  for (const auto& r : rows) {
    res.pass = res.pass && r.converged;
    worst_iters = std::max(worst_iters, r.iterations);
    csv.append_row({"uniqueness", fmt(cfg.seed), fmt(cfg.level), f.name(),
                    fmt(r.seed_index), fmt(r.start_index), fmt(r.iterations),
                    fmt(r.final_sup), r.converged ? "1" : "0"});
  }
  res.metrics["worst_iterations"] = worst_iters;
  res.detail = "all starts converged: " + std::string(res.pass ? "yes" : "no") +
               ", worst iterations " + std::to_string(worst_iters);
  if (cfg.emit_csv)
    res.artifacts.push_back(
        csv.write(fs::path(cfg.out_dir) / "uniqueness.csv"));
  return res;
}

// ---------------------------------------------------------------------------
// chain
// ---------------------------------------------------------------------------

ExperimentResult run_chain(const RunConfig& cfg) {
  ExperimentResult res;
  res.name = "chain";
  const DriftField f = cfg_drift(cfg);
  const int lq = std::max(cfg.quad_level, cfg.chain_n + 6);
  const int level = std::max(cfg.level, lq);
  const DyadicPath path = DyadicPath::generate(cfg.seed, cfg.dim, level);
  std::vector<double> x0(static_cast<std::size_t>(cfg.dim), 0.0);
  x0[0] = cfg.chain_x0;
  const auto chain =
      euler_chain(path, f, cfg.chain_n, cfg.chain_k, cfg.chain_r, x0, lq);
  CsvWriter csv({"experiment", "seed", "quad_level", "field", "n", "k", "r",
                 "q", "norm", "bound", "pass"});
  const double growth =
      1.0 + baselines::kChainGrowthC *
                std::pow(2.0, -static_cast<double>(cfg.chain_n) / 4.0);
  const double x0_norm = std::fabs(cfg.chain_x0);
  bool pass = true;
  for (std::size_t q = 0; q < chain.points.size(); ++q) {
    double norm = 0.0;
    for (double v : chain.points[q]) norm += v * v;
    norm = std::sqrt(norm);
    const double bound =
        x0_norm * std::pow(growth, static_cast<double>(q)) +
        static_cast<double>(q) * baselines::kChainQuadSlack;
    const bool ok = norm <= bound;
    pass = pass && ok;
    csv.append_row({"chain", fmt(cfg.seed), fmt(lq), f.name(),
                    fmt(cfg.chain_n), fmt(cfg.chain_k), fmt(cfg.chain_r),
                    fmt(std::uint64_t{q}), fmt(norm), fmt(bound),
                    ok ? "1" : "0"});
  }
  if (!chain.regime_ok)
    res.detail = "warning: r exceeds the 2^{n/2} regime; ";
  res.pass = pass;
  res.metrics["rho_abs_sum"] = chain.rho_abs_sum;
  res.detail += "sum |rho| = " + fmt(chain.rho_abs_sum);
  if (cfg.emit_csv) {
    const auto file = csv.write(fs::path(cfg.out_dir) / "chain.csv");
    res.artifacts.push_back(file);
    if (cfg.emit_gnuplot) emit_gnuplot_script(file, 8, 9, "chain norms");
  }
  return res;
}

ExperimentResult run_single(const RunConfig& cfg) {
  if (cfg.experiment == "paths") return run_paths(cfg);
  if (cfg.experiment == "moments") return run_moments(cfg);
  if (cfg.experiment == "constants") return run_constants(cfg);
  if (cfg.experiment == "tails") return run_tails(cfg);
  if (cfg.experiment == "l2") return run_l2(cfg);
  if (cfg.experiment == "dyadic") return run_dyadic(cfg);
  if (cfg.experiment == "euler") return run_euler(cfg);
  if (cfg.experiment == "uniqueness") return run_uniqueness(cfg);
  if (cfg.experiment == "chain") return run_chain(cfg);
  if (cfg.experiment == "kernels") return run_kernels(cfg);
  if (cfg.experiment == "words") return run_words(cfg);
  throw ConfigError("unknown experiment " + cfg.experiment);
}

}  // namespace

void validate_config(RunConfig& cfg) {
  if (!known_experiments().count(cfg.experiment))
    throw ConfigError("unknown experiment '" + cfg.experiment + "'");
  if (cfg.dim < 1) throw ConfigError("dimension must be >= 1");
  if (cfg.level < 0 || cfg.level > DyadicPath::kMaxLevel)
    throw ConfigError("path level outside [0, 24]");
  if (cfg.quad_level < 6 || cfg.quad_level > DyadicPath::kMaxLevel)
    throw ConfigError("quadrature level outside [6, 24]");
  if (cfg.n_rep < 1) throw ConfigError("replica count must be >= 1");
  if (cfg.p % 2 != 0 || cfg.p < 2 || cfg.p > 8)
    throw ConfigError("moment order p must be even (Prop.-style shape needs "
                      "p/2 factorial), 2 <= p <= 8");
  for (int p : cfg.p_grid)
    if (p % 2 != 0 || p < 2 || p > 8)
      throw ConfigError("p grid entries must be even integers in [2, 8]");
  for (double x : cfg.x_grid)
    if (std::fabs(x) > 1.0)
      throw ConfigError("shift grid must lie inside Q (|x| <= 1)");
  for (double l : cfg.lambda_grid)
    if (l < 0.0 || l > 16.0) throw ConfigError("lambda grid outside [0, 16]");
  int n_max = 0;
  for (int n : cfg.n_grid) {
    if (n < 1 || n > 16) throw ConfigError("n grid outside [1, 16]");
    n_max = std::max(n_max, n);
  }
  if (cfg.experiment == "dyadic" && cfg.quad_level_set &&
      cfg.quad_level < n_max + 6)
    throw ConfigError(
        "quadrature level violates the oversampling floor L_q >= n + 6");
  if (cfg.words_k < 1 || cfg.words_k > 20)
    throw ConfigError("words k outside [1, 20]");
  if (cfg.tol <= 0.0) throw ConfigError("tolerance must be positive");
  if (cfg.max_iter < 1) throw ConfigError("max_iter must be >= 1");
  if (cfg.starts < 1 || cfg.n_seeds < 1)
    throw ConfigError("starts and seeds must be >= 1");
  if (cfg.chain_n < 1 || cfg.chain_n > 16)
    throw ConfigError("chain n outside [1, 16]");
  if (cfg.chain_r < 0) throw ConfigError("chain length must be >= 0");
  if (cfg.workers < 0) throw ConfigError("workers must be >= 0");
  parse_partition_spec(cfg.partition);
  if (cfg.level < cfg.quad_level &&
      (cfg.experiment == "moments" || cfg.experiment == "tails" ||
       cfg.experiment == "constants" || cfg.experiment == "l2"))
    cfg.level = cfg.quad_level;
  if (cfg.out_dir.empty()) throw ConfigError("output directory must be set");
}

ExperimentResult run_experiment(const RunConfig& cfg) {
  RunConfig checked = cfg;
  validate_config(checked);
  fs::create_directories(checked.out_dir);
  if (checked.experiment != "all") return run_single(checked);

  ExperimentResult res;
  res.name = "all";
  const std::vector<std::pair<std::string, std::string>> plan = {
      {"words", checked.field},     {"kernels", checked.field},
      {"paths", checked.field},     {"moments", "sign"},
      {"constants", "sign"},        {"tails", "sign"},
      {"l2", "box_indicator"},      {"dyadic", "sign"},
      {"euler", "sign"},            {"uniqueness", "sign"},
      {"chain", "sign"}};
  for (const auto& [name, field] : plan) {
    RunConfig sub = checked;
    sub.experiment = name;
    sub.field = field;
    if (name == "dyadic") sub.n_rep = std::min(checked.n_rep, 200);
    if (name == "tails") sub.lambda_grid = checked.lambda_grid;
    auto out = run_single(sub);
    res.pass = res.pass && out.pass;
    res.detail += out.name + (out.pass ? ":pass " : ":FAIL ");
    for (auto& a : out.artifacts) res.artifacts.push_back(a);
    for (auto& [k, v] : out.metrics) res.metrics[name + "." + k] = v;
  }
  return res;
}

int run_with_manifest(const RunConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const ExperimentResult res = run_experiment(cfg);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();

  json manifest;
  manifest["version"] = kVersion;
  manifest["wall_time_s"] = wall;
  manifest["pass"] = res.pass;
  json config;
  config["experiment"] = cfg.experiment;
  config["field"] = cfg.field;
  config["dim"] = cfg.dim;
  config["seed"] = cfg.seed;
  config["n_rep"] = cfg.n_rep;
  config["level"] = cfg.level;
  config["quad_level"] = cfg.quad_level;
  config["p_grid"] = cfg.p_grid;
  config["x_grid"] = cfg.x_grid;
  config["lambda_grid"] = cfg.lambda_grid;
  config["n_grid"] = cfg.n_grid;
  config["partition"] = cfg.partition;
  config["workers"] = cfg.workers;
  config["out_dir"] = cfg.out_dir;
  manifest["config"] = config;
  json exp;
  exp["name"] = res.name;
  exp["pass"] = res.pass;
  exp["detail"] = res.detail;
  json arts = json::array();
  for (const auto& a : res.artifacts) arts.push_back(a.string());
  exp["artifacts"] = arts;
  json metrics;
  for (const auto& [k, v] : res.metrics) metrics[k] = v;
  exp["metrics"] = metrics;
  manifest["experiments"] = json::array({exp});

  const fs::path out = fs::path(cfg.out_dir) / "manifest.json";
  const fs::path tmp = fs::path(cfg.out_dir) / "manifest.json.tmp";
  {
    std::ofstream f(tmp, std::ios::binary);
    f << manifest.dump(2) << '\n';
  }
  fs::rename(tmp, out);
  return res.pass ? 0 : 1;
}

}  // namespace pathwise::runner
