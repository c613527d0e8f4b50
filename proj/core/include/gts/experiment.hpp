#pragma once

#include <filesystem>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gts/simulate.hpp"

namespace gts {

// Raised by parse_config; `issues` lists every offending config path.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  std::vector<std::string> issues_;
};

// Command-line overrides applied to the config document before resolution.
struct CliOverrides {
  std::optional<int> num_seeds;
  std::optional<bool> snapshot_weights;
  std::optional<int> grid_resolution;
};

// A fully validated experiment: instance, resolved run parameters, and the
// per-subcommand settings. `resolved_json` is the canonical echo embedded in
// every output file, so results are self-describing.
struct ExperimentConfig {
  ExperimentConfig(Environment env, ExpertSet expert_set)
      : environment(std::move(env)), experts(std::move(expert_set)) {}

  Environment environment;
  ExpertSet experts;
  RunConfig run;
  int num_seeds = 1;
  bool eta_is_auto = false;
  bool gamma_is_auto = false;
  // 4 for square loss, a grid estimate for normalized-log, NaN for raw-log.
  double kappa2 = std::numeric_limits<double>::quiet_NaN();

  std::vector<std::int64_t> sweep_horizons;
  std::vector<double> sweep_etas;
  std::vector<double> sweep_gammas;
  std::vector<std::vector<double>> sweep_priors;

  std::vector<double> bayes_true_prior;
  int bayes_num_draws = 8;

  int grid_resolution = 199;
  std::vector<double> check_f_values;
  int sweep_resolution = 1001;

  std::string resolved_json;
  std::vector<std::string> warnings;
};

ExperimentConfig parse_config(const std::string& json_text, const CliOverrides& overrides = {});
ExperimentConfig parse_config_file(const std::filesystem::path& path,
                                   const CliOverrides& overrides = {});

enum class Subcommand { kRun, kSweep, kBayes, kCheck };

// Executes one subcommand, writing its artifacts under out_dir. Returns the
// process exit status: 0 on success, 2 when a `check` condition fails (the
// report is still written). I/O and numeric failures throw.
int run_command(const ExperimentConfig& cfg, Subcommand subcommand,
                const std::filesystem::path& out_dir, int parallelism = 1);

}  // namespace gts
