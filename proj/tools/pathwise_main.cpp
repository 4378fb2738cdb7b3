// Reproducible experiment runner: every subcommand is driven by a flat
// config (flags or key=value file, flags win) plus a seed, writes CSV
// artifacts and a JSON manifest, and exits 0 only if its envelope checks
// pass (1: envelope failure, 2: config error).

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pathwise/kernel_lab.hpp"
#include "pathwise/runner.hpp"

namespace {

using pathwise::runner::RunConfig;

void add_common_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--seed", cfg.seed, "Base seed (default 1)");
  sub->add_option("--replicas", cfg.n_rep, "Monte Carlo replica count");
  sub->add_option("--level", cfg.level, "Path level L (default 14)");
  sub->add_option("--quad-level", cfg.quad_level,
                  "Quadrature level L_q (default 12)")
      ->check(CLI::Range(6, 24));
  sub->add_option("--dim", cfg.dim, "State dimension d");
  sub->add_option("--drift,--field", cfg.field, "Catalog field name");
  sub->add_option("--partition", cfg.partition, "Partition spec kind:N");
  sub->add_option("--out", cfg.out_dir, "Output directory");
  sub->add_option("--workers", cfg.workers,
                  "Worker threads (0 = hardware parallelism)");
  sub->add_flag("--emit-gnuplot", cfg.emit_gnuplot,
                "Write gnuplot scripts next to CSVs");
  sub->add_option("--format",
                  [&cfg](const std::vector<std::string>& vals) {
                    cfg.emit_csv = false;
                    cfg.emit_json = false;
                    for (const auto& v : vals) {
                      if (v == "csv")
                        cfg.emit_csv = true;
                      else if (v == "json")
                        cfg.emit_json = true;
                      else
                        return false;
                    }
                    return true;
                  },
                  "Artifact formats: csv,json")
      ->delimiter(',');
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pathwise: dyadic Brownian paths, occupation functionals, "
               "Euler schemes on arbitrary partitions, and Monte Carlo "
               "verification of their quantitative estimates"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Key=value config file; flags override it");
  app.allow_config_extras(false);

  RunConfig cfg;

  auto* paths = app.add_subcommand("paths", "Generate a seeded dyadic path");
  paths->add_flag("--binary", cfg.emit_binary_path, "Also dump path.bin");
  auto* moments =
      app.add_subcommand("moments", "Moment-bound sweep over x and p");
  moments->add_option("--p-grid", cfg.p_grid, "Even moment orders")
      ->delimiter(',');
  moments->add_option("--x-grid", cfg.x_grid, "Shift grid")->delimiter(',');
  auto* constants =
      app.add_subcommand("constants", "Fitted-constant sweep over x");
  constants->add_option("--p", cfg.p, "Even moment order for the fit");
  constants->add_option("--x-grid", cfg.x_grid, "Shift grid")->delimiter(',');
  auto* tails = app.add_subcommand("tails", "Sub-Gaussian tail envelope");
  tails->add_option("--x-grid", cfg.x_grid, "Shift (first entry used)")
      ->delimiter(',');
  tails->add_option("--lambda-grid", cfg.lambda_grid, "Lambda grid")
      ->delimiter(',');
  auto* l2 = app.add_subcommand("l2", "L2 functional bound vs ||g||_p");
  l2->add_option("--p", cfg.lp, "Integrability order p > 1 + d/2");
  auto* dyadic =
      app.add_subcommand("dyadic", "Dyadic modulus scaling sweep over n");
  dyadic->add_option("--n-grid", cfg.n_grid, "Dyadic levels")->delimiter(',');
  auto* euler = app.add_subcommand(
      "euler", "Euler convergence study and partition comparison");
  auto* uniqueness = app.add_subcommand(
      "uniqueness", "Picard collapse of the perturbation equation");
  uniqueness->add_option("--starts", cfg.starts, "Random starts per seed");
  uniqueness->add_option("--seeds", cfg.n_seeds, "Seed count");
  uniqueness->add_option("--tol", cfg.tol, "Convergence tolerance");
  uniqueness->add_option("--max-iter", cfg.max_iter, "Iteration cap");
  auto* chain = app.add_subcommand("chain", "sigma-recurrence chain experiment");
  chain->add_option("--n", cfg.chain_n, "Dyadic level n");
  chain->add_option("--k", cfg.chain_k, "Start interval index");
  chain->add_option("--r", cfg.chain_r, "Chain length");
  chain->add_option("--x0", cfg.chain_x0, "Start point (first axis)");
  auto* kernels =
      app.add_subcommand("kernels", "Heat-kernel L1 mass table");
  auto* words = app.add_subcommand("words", "Allowed-word combinatorics");
  words->add_option("--k", cfg.words_k, "Check lengths 1..k")
      ->check(CLI::Range(1, 20));
  auto* all = app.add_subcommand("all", "Run every experiment with defaults");

  for (CLI::App* sub : {paths, moments, constants, tails, l2, dyadic, euler,
                        uniqueness, chain, kernels, words, all})
    add_common_options(sub, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  cfg.experiment = sub->get_name();
  cfg.quad_level_set = sub->count("--quad-level") > 0;

  try {
    pathwise::runner::validate_config(cfg);
    const int code = pathwise::runner::run_with_manifest(cfg);
    if (cfg.experiment == "words") {
      const auto count = pathwise::allowed_words(cfg.words_k).size();
      std::printf("%zu\n", count);
    }
    if (code != 0)
      std::fprintf(stderr, "envelope check failed (see %s/manifest.json)\n",
                   cfg.out_dir.c_str());
    return code;
  } catch (const pathwise::runner::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
