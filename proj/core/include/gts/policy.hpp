#pragma once

#include <span>
#include <vector>

#include "gts/bandit.hpp"

namespace gts {

// Exponentiated-update weight state over N experts. Weights live in log
// domain: over long horizons the unnormalized weights underflow doubles,
// while their logs stay comfortably in range. Normalization happens on read
// via a max-shifted softmax.
class WeightState {
 public:
  // prior must sum to 1 within 1e-12 with nonnegative entries. An expert with
  // zero prior mass stays at zero weight forever. eta >= 0, gamma in [0, 1].
  WeightState(std::vector<double> prior, double eta, double gamma);

  int size() const { return static_cast<int>(log_weights_.size()); }
  double eta() const { return eta_; }
  double gamma() const { return gamma_; }
  const std::vector<double>& prior() const { return prior_; }

  // Log of the unnormalized weight w_i (-inf for zero-prior experts).
  double log_weight(int i) const {
    return log_weights_[static_cast<std::size_t>(i)] + carry_[static_cast<std::size_t>(i)];
  }
  std::vector<double> log_weights() const;

  // Normalized weights (max-shifted softmax of the log weights).
  std::vector<double> normalized() const;

  // w_i <- w_i * exp(-eta * losses[i]). Losses must be finite.
  void update(std::span<const double> losses);

 private:
  std::vector<double> prior_;
  std::vector<double> log_weights_;
  std::vector<double> carry_;  // Neumaier compensation; keeps 1e4-step runs exact to the last bit
  double eta_;
  double gamma_;
};

// Probabilities over arms; entries sum to 1 and each is at least gamma / K.
struct ArmDistribution {
  std::vector<double> probs;
};

// Mixture arm probabilities: (1 - gamma) * sum_i wbar_i * 1{greedy_i(x) = a}
// plus the uniform exploration floor gamma / K.
ArmDistribution arm_distribution(const WeightState& state, const ExpertSet& experts, int context);

// Samples one arm by inverse CDF over arm ids in increasing order. One draw.
int select_arm(const ArmDistribution& dist, Rng& rng);

// Learning rate 1 / (2 (e - 2) kappa2) that makes the total shifted loss
// bound horizon-independent.
double recommended_eta(double kappa2);

// Exploration rate min(1, scale * (K / T)^(1/3)).
double recommended_gamma(int num_arms, std::int64_t horizon, double scale = 1.0);

}  // namespace gts
