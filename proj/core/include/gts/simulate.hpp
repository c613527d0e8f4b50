#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gts/bandit.hpp"
#include "gts/losses.hpp"
#include "gts/policy.hpp"

namespace gts {

// Parameters of one simulated episode.
struct RunConfig {
  std::int64_t horizon = 1;
  LossSpec loss;
  double eta = 1.0;
  double gamma = 0.0;
  std::vector<double> prior;
  std::uint64_t seed = 0;
  bool snapshot_weights = false;
  std::int64_t snapshot_stride = 1;
};

struct StepRecord {
  int context = 0;
  int arm = 0;
  int reward = 0;
  // mu(x, best arm) - mu(x, chosen arm); best arm is the truth expert's
  // greedy arm, which maximizes mu under realizability.
  double regret_increment = 0.0;
  // sum_i wbar_{i,t} * (loss_i - loss_truth) at the realized (x, a, r),
  // with the weights entering the step.
  double avg_shifted_loss = 0.0;
};

struct RunTrace {
  std::vector<StepRecord> steps;
  // Normalized weights entering step t, captured every snapshot_stride steps.
  std::vector<std::int64_t> snapshot_steps;
  std::vector<std::vector<double>> weight_snapshots;
  // Normalized weights after the final update.
  std::vector<double> final_weights;
};

// Runs one episode: per step draw context, form the mixture arm
// distribution, sample an arm, sample a reward, score every expert on the
// observed (x, a, r), and apply the exponentiated update. The run owns a
// single RNG seeded from (environment.rng_seed, config.seed); draws happen in
// the fixed order context, arm, reward.
RunTrace run_episode(const Environment& env, const ExpertSet& experts, const RunConfig& cfg);

// Prefix sums of the per-step regret increments.
std::vector<double> cumulative_regret(const RunTrace& trace);

// Sum over steps of the recorded average shifted loss.
double average_shifted_loss_total(const RunTrace& trace);

struct RegretEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  double ci_low = 0.0;   // 95% normal approximation
  double ci_high = 0.0;
  int num_seeds = 0;
  std::vector<double> per_seed_final;
};

// Mean final cumulative regret over num_seeds episodes with seeds
// cfg.seed + 0 .. cfg.seed + num_seeds - 1. Episodes may run on
// `parallelism` threads; results merge in seed order either way.
RegretEstimate mean_regret(const Environment& env, const ExpertSet& experts, const RunConfig& cfg,
                           int num_seeds, int parallelism = 1);

// 4 (e - 2) kappa2 ln(1 / p1): horizon-independent cap on the expected total
// average shifted loss at the recommended learning rate.
double lemma1_bound(double kappa2, double p1);

// sqrt(4 kappa2 (e - 2)) * kappa1 * (1 - gamma) * sqrt(T ln(1 / p1)) + gamma T.
double corollary1_bound(double kappa1, double kappa2, double gamma, std::int64_t horizon,
                        double p1);

// Same shape with ln(1 / p1) replaced by H(p*) + KL(p* || p).
double corollary2_bound(double kappa1, double kappa2, double gamma, std::int64_t horizon,
                        double entropy_plus_kl);

// kappa1 = sqrt(2 K / gamma) for square loss. Requires gamma > 0.
double square_loss_kappa1(int num_arms, double gamma);

// kappa1 = K sqrt(2 beta / gamma) for normalized-log loss. Requires gamma > 0.
double log_loss_kappa1(int num_arms, double beta, double gamma);

// Shannon entropy of a probability vector, natural log, 0 log 0 = 0.
double entropy(std::span<const double> p);

// Discrete KL(p || q), natural log; +inf when q vanishes where p does not.
double kl_divergence(std::span<const double> p, std::span<const double> q);

struct BoundReport {
  double lemma1 = 0.0;
  double corollary1 = 0.0;
  double corollary2 = 0.0;
  double entropy = 0.0;
  double kl_prior = 0.0;
  double kappa1 = 0.0;
  double kappa2 = 0.0;
};

// Assembles the bound report for a run configuration. kappa2 is 4 for square
// loss and a grid estimate for normalized-log; raw-log has no bounds and is
// rejected. When no true prior is supplied the corollary-2 entry uses the
// algorithm's own prior (entropy term only).
BoundReport make_bound_report(const LossSpec& loss, int num_arms, double gamma,
                              std::int64_t horizon, std::span<const double> prior,
                              int truth_index, double kappa2,
                              std::span<const double> true_prior = {});

struct BayesConfig {
  std::vector<double> true_prior;
  int num_draws = 1;
  int num_seeds_per_draw = 2;
};

struct BayesResult {
  RegretEstimate regret;
  double entropy_true_prior = 0.0;
  double kl_true_vs_algorithm = 0.0;
  double corollary2 = 0.0;  // NaN when kappa1/kappa2 are unavailable (raw-log)
  std::vector<int> drawn_truth_indices;
  std::vector<double> per_draw_mean_regret;
};

// Bayes-regret experiment: samples the optimal expert index from the true
// prior, relabels the environment's mean rewards to that expert's table
// (keeping the expert set and the algorithm's prior fixed), and averages
// mean_regret over draws. All draws share seeds, hence context streams
// (common random numbers).
BayesResult bayes_regret_experiment(const Environment& env, const ExpertSet& experts,
                                    const RunConfig& cfg, const BayesConfig& bayes,
                                    double kappa1, double kappa2, int parallelism = 1);

}  // namespace gts
