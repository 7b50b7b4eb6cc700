// rabc: simulation-based rejection ABC with robust summary/weight adjustments.
//
//   rabc run --config <file.cfg> [--seed N] [--draws N] [--quantile Q]
//            [--threads T] [--out-dir DIR]
//   rabc diagnose --sample <archive.csv> [--out-dir DIR]
//   rabc fit-aux --returns <returns.csv> [--out-dir DIR]
//
// RABC_THREADS sets the default worker count.
#include <CLI11.hpp>

#include "rabc/cli.hpp"
#include "rabc/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"robust approximate Bayesian computation engine"};
  app.set_version_flag("--version", rabc::kVersion);
  app.require_subcommand(1);

  rabc::CliOptions opts;
  std::uint64_t seed = 0;
  std::size_t draws = 0;
  double quantile = 0.0;
  int threads = 0;

  auto* run = app.add_subcommand("run", "run an experiment from a config file");
  run->add_option("--config", opts.config_path, "experiment config file")->required();
  auto* seed_opt = run->add_option("--seed", seed, "override the config seed");
  auto* draws_opt = run->add_option("--draws", draws, "override the simulation count");
  auto* quant_opt = run->add_option("--quantile", quantile, "override the accept quantile");
  auto* thread_opt = run->add_option("--threads", threads, "worker threads");
  run->add_option("--out-dir", opts.out_dir, "output directory");

  std::string sample_path, out_dir = ".", returns_csv;
  auto* diagnose = app.add_subcommand("diagnose", "misspecification report from a saved sample");
  diagnose->add_option("--sample", sample_path, "sample archive from a prior run")->required();
  diagnose->add_option("--out-dir", out_dir, "output directory");

  auto* fit_aux = app.add_subcommand("fit-aux", "fit the auxiliary GARCH(1,1)-t model");
  fit_aux->add_option("--returns", returns_csv, "returns CSV")->required();
  fit_aux->add_option("--out-dir", out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    if (*seed_opt) opts.seed = seed;
    if (*draws_opt) opts.draws = draws;
    if (*quant_opt) opts.quantile = quantile;
    if (*thread_opt) opts.threads = threads;
    return rabc::cmd_run(opts);
  }
  if (diagnose->parsed()) return rabc::cmd_diagnose(sample_path, out_dir);
  return rabc::cmd_fit_aux(returns_csv, out_dir);
}
