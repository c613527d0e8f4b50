#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gts/experiment.hpp"

namespace {

struct Options {
  std::string config_path;
  std::string out_dir = "out";
  int parallelism = 1;
  int seeds = 0;              // 0: keep the config's num_seeds
  bool snapshot_weights = false;
  int grid_resolution = 0;    // 0: keep the config's value
};

void add_common_options(CLI::App* cmd, Options& opts) {
  cmd->add_option("--config", opts.config_path, "Experiment config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", opts.out_dir, "Output directory");
  cmd->add_option("--seeds", opts.seeds, "Override run.num_seeds");
  cmd->add_option("--parallelism", opts.parallelism, "Worker threads for seeds and sweep cells");
  cmd->add_flag("--snapshot-weights", opts.snapshot_weights,
                "Record normalized weights in trace output");
  cmd->add_option("--grid-resolution", opts.grid_resolution,
                  "Override check.grid_resolution for condition checks");
}

int dispatch(const Options& opts, gts::Subcommand subcommand) {
  gts::CliOverrides overrides;
  if (opts.seeds > 0) overrides.num_seeds = opts.seeds;
  if (opts.snapshot_weights) overrides.snapshot_weights = true;
  if (opts.grid_resolution > 0) overrides.grid_resolution = opts.grid_resolution;

  const gts::ExperimentConfig cfg = gts::parse_config_file(opts.config_path, overrides);
  for (const std::string& warning : cfg.warnings) {
    std::cerr << "warning: " << warning << "\n";
  }
  return gts::run_command(cfg, subcommand, opts.out_dir, opts.parallelism);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized Thompson Sampling simulator and bound checker"};
  app.require_subcommand(1);

  Options opts;
  CLI::App* run = app.add_subcommand("run", "Simulate episodes; writes summary.json and traces");
  CLI::App* sweep =
      app.add_subcommand("sweep", "Cross product over horizon/eta/gamma/prior lists");
  CLI::App* bayes = app.add_subcommand("bayes", "Bayes-regret experiment over a true prior");
  CLI::App* check =
      app.add_subcommand("check", "Verify conditions C1-C4 and sweep the F curve");
  for (CLI::App* cmd : {run, sweep, bayes, check}) add_common_options(cmd, opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return dispatch(opts, gts::Subcommand::kRun);
    if (sweep->parsed()) return dispatch(opts, gts::Subcommand::kSweep);
    if (bayes->parsed()) return dispatch(opts, gts::Subcommand::kBayes);
    return dispatch(opts, gts::Subcommand::kCheck);
  } catch (const gts::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
