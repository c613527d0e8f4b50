#include "gts/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace gts {

WeightState::WeightState(std::vector<double> prior, double eta, double gamma)
    : prior_(std::move(prior)), eta_(eta), gamma_(gamma) {
  if (prior_.empty()) throw std::invalid_argument("prior must be non-empty");
  if (!(eta_ >= 0.0) || !std::isfinite(eta_)) {
    throw std::invalid_argument("eta must be finite and nonnegative");
  }
  if (!(gamma_ >= 0.0 && gamma_ <= 1.0)) throw std::invalid_argument("gamma must lie in [0, 1]");
  double sum = 0.0;
  for (std::size_t i = 0; i < prior_.size(); ++i) {
    if (!(prior_[i] >= 0.0) || !std::isfinite(prior_[i])) {
      std::ostringstream msg;
      msg << "prior[" << i << "] = " << prior_[i] << " must be finite and nonnegative";
      throw std::invalid_argument(msg.str());
    }
    sum += prior_[i];
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    std::ostringstream msg;
    msg << "prior sums to " << sum << ", expected 1 within 1e-12";
    throw std::invalid_argument(msg.str());
  }
  log_weights_.resize(prior_.size());
  carry_.assign(prior_.size(), 0.0);
  for (std::size_t i = 0; i < prior_.size(); ++i) {
    log_weights_[i] =
        prior_[i] > 0.0 ? std::log(prior_[i]) : -std::numeric_limits<double>::infinity();
  }
}

std::vector<double> WeightState::log_weights() const {
  std::vector<double> out(log_weights_.size());
  for (int i = 0; i < size(); ++i) out[static_cast<std::size_t>(i)] = log_weight(i);
  return out;
}

std::vector<double> WeightState::normalized() const {
  std::vector<double> out(log_weights_.size());
  double max_log = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < size(); ++i) max_log = std::max(max_log, log_weight(i));
  double total = 0.0;
  for (int i = 0; i < size(); ++i) {
    const double w = std::exp(log_weight(i) - max_log);
    out[static_cast<std::size_t>(i)] = w;
    total += w;
  }
  for (double& w : out) w /= total;
  return out;
}

void WeightState::update(std::span<const double> losses) {
  if (static_cast<int>(losses.size()) != size()) {
    std::ostringstream msg;
    msg << "loss vector length " << losses.size() << " does not match " << size() << " experts";
    throw std::invalid_argument(msg.str());
  }
  for (std::size_t i = 0; i < losses.size(); ++i) {
    if (!std::isfinite(losses[i])) {
      std::ostringstream msg;
      msg << "loss[" << i << "] = " << losses[i] << " is not finite";
      throw std::range_error(msg.str());
    }
    double& sum = log_weights_[i];
    if (std::isinf(sum)) continue;  // zero-prior expert
    const double delta = -eta_ * losses[i];
    const double t = sum + delta;
    carry_[i] += std::abs(sum) >= std::abs(delta) ? (sum - t) + delta : (delta - t) + sum;
    sum = t;
  }
}

ArmDistribution arm_distribution(const WeightState& state, const ExpertSet& experts,
                                 int context) {
  if (state.size() != experts.size()) {
    std::ostringstream msg;
    msg << "weight state holds " << state.size() << " experts, set holds " << experts.size();
    throw std::invalid_argument(msg.str());
  }
  const int num_arms = experts.num_arms();
  const double gamma = state.gamma();
  ArmDistribution dist;
  dist.probs.assign(static_cast<std::size_t>(num_arms), gamma / num_arms);
  const std::vector<double> weights = state.normalized();
  for (int i = 0; i < experts.size(); ++i) {
    dist.probs[static_cast<std::size_t>(experts[i].greedy_arm(context))] +=
        (1.0 - gamma) * weights[static_cast<std::size_t>(i)];
  }
  return dist;
}

int select_arm(const ArmDistribution& dist, Rng& rng) {
  const double u = rng.uniform();
  double cumulative = 0.0;
  const int num_arms = static_cast<int>(dist.probs.size());
  for (int a = 0; a < num_arms; ++a) {
    cumulative += dist.probs[static_cast<std::size_t>(a)];
    if (u < cumulative) return a;
  }
  return num_arms - 1;
}

double recommended_eta(double kappa2) {
  if (!(kappa2 > 0.0)) throw std::invalid_argument("kappa2 must be positive");
  return 1.0 / (2.0 * (std::numbers::e - 2.0) * kappa2);
}

double recommended_gamma(int num_arms, std::int64_t horizon, double scale) {
  if (num_arms < 1) throw std::invalid_argument("need at least one arm");
  if (horizon < 1) throw std::invalid_argument("horizon must be positive");
  if (!(scale > 0.0)) throw std::invalid_argument("scale must be positive");
  const double ratio = static_cast<double>(num_arms) / static_cast<double>(horizon);
  return std::min(1.0, scale * std::cbrt(ratio));
}

}  // namespace gts
