#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace pathwise::runner {

inline constexpr const char* kVersion = "0.1.0";

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One flat config per run; a run is reproducible from config + seed alone.
struct RunConfig {
  std::string experiment;  // paths moments constants tails l2 dyadic euler
                           // uniqueness chain kernels words all
  std::string field = "sign";
  int dim = 1;
  std::uint64_t seed = 1;
  int n_rep = 10000;
  int level = 14;       // path level L
  int quad_level = 12;  // quadrature level L_q
  bool quad_level_set = false;
  int p = 2;
  std::vector<int> p_grid = {2, 4, 6};
  std::vector<double> x_grid = {0.5, 0.1, 0.02, 0.004};
  std::vector<double> lambda_grid = {1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0};
  std::vector<int> n_grid = {4, 5, 6, 7, 8, 9, 10};
  std::string partition = "uniform:256";
  int words_k = 16;            // words: check 1..k
  int starts = 10;             // uniqueness: random starts per seed
  int n_seeds = 20;            // uniqueness: seeds
  double tol = 1e-3;           // uniqueness
  int max_iter = 60;           // uniqueness
  int chain_n = 8;             // chain experiment
  std::uint64_t chain_k = 0;
  int chain_r = 16;
  double chain_x0 = 0.5;
  double lp = 2.0;             // l2 experiment
  int workers = 0;             // 0 = hardware parallelism
  std::string out_dir = "out";
  bool emit_csv = true;
  bool emit_json = true;
  bool emit_gnuplot = false;
  bool emit_binary_path = false;  // paths experiment
};

/// Fill defaults, check ranges, expand grids. Throws ConfigError.
void validate_config(RunConfig& cfg);

struct ExperimentResult {
  std::string name;
  bool pass = true;
  std::vector<std::filesystem::path> artifacts;
  std::map<std::string, double> metrics;
  std::string detail;  // one-line human summary
};

/// Execute one experiment; writes CSV artifacts under cfg.out_dir.
/// CSV bytes depend only on (config, seed, version), never on workers.
ExperimentResult run_experiment(const RunConfig& cfg);

/// Run an experiment and write the JSON manifest (atomically) next to the
/// artifacts. Returns the process exit code: 0 pass, 1 envelope failure.
int run_with_manifest(const RunConfig& cfg);

/// Frozen regression baselines, calibrated once with the reference
/// generator and pinned here.
namespace baselines {
// Sample variance of the 1024 level-10 increments of path seed 42, times 2^10.
inline constexpr double kIncrementVarSeed42 = 1.0174640259932714;
// sigma(seed 7, sign, I_{0,0}, x = 0.25, L_q = 16).
inline constexpr double kSigmaSeed7 = 0.10453965700510631;
// Ceiling for the dyadic modulus sweep's normalized maxima (seeded run,
// n in 4..10, 200 paths) with headroom.
inline constexpr double kDyadicCeiling = 3.0;
// Fitted growth constant and per-step quadrature slack for the Euler chain
// norm-growth envelope.
inline constexpr double kChainGrowthC = 4.0;
inline constexpr double kChainQuadSlack = 1e-3;
// Uniform Euler at N = 2^12 vs the level-18 reference, drift sign, seed 7.
inline constexpr double kEulerRegressionThreshold = 1e-2;
}  // namespace baselines

}  // namespace pathwise::runner
