#pragma once

#include "gts/bandit.hpp"

namespace gts {

enum class LossKind { kSquare, kNormalizedLog, kRawLog };

// Loss used to score a reward prediction against a binary reward.
//   square:         (prediction - reward)^2
//   normalized-log: log loss scaled by 1/beta, so that a beta-compatible
//                   expert set has shifted losses inside [-1, 1]
//   raw-log:        plain negative log-likelihood; exists only to realize the
//                   classic Thompson Sampling special case (eta = 1, gamma = 0)
struct LossSpec {
  LossKind kind = LossKind::kSquare;
  double beta = 1.0;

  static LossSpec square() { return {LossKind::kSquare, 1.0}; }
  static LossSpec normalized_log(double beta) { return {LossKind::kNormalizedLog, beta}; }
  static LossSpec raw_log() { return {LossKind::kRawLog, 1.0}; }
};

// Throws unless the spec is well formed (beta > 0 for normalized-log).
void validate(const LossSpec& spec);

const char* loss_kind_name(LossKind kind);

double loss_eval(const LossSpec& spec, double prediction, int reward);

// Loss of prediction f_i minus loss of the truth prediction f_1 on the same
// observed reward. Can be negative.
double shifted_loss(const LossSpec& spec, double f_i, double f_1, int reward);

// E_r[shifted loss] with r ~ Bernoulli(f_1). Closed form: (f_i - f_1)^2 for
// square loss, KL(f_1 || f_i) / beta for the log losses.
double expected_shifted_loss(const LossSpec& spec, double f_i, double f_1);

// E_r[shifted loss^2] with r ~ Bernoulli(f_1).
double second_moment_shifted_loss(const LossSpec& spec, double f_i, double f_1);

// KL divergence between Bernoulli(p) and Bernoulli(q), natural log,
// with the convention 0 * log 0 = 0. Requires q strictly inside (0, 1).
double kl_bernoulli(double p, double q);

// Result of checking that every per-outcome log-ratio between the truth
// expert and any other stays within [-beta/2, beta/2].
struct BetaCompatReport {
  bool pass = false;
  double max_abs_log_ratio = 0.0;
  double min_admissible_beta = 0.0;
  int worst_expert = -1;
  int worst_context = -1;
  int worst_arm = -1;
};

BetaCompatReport validate_beta_compatibility(const ExpertSet& experts, double beta);

}  // namespace gts
