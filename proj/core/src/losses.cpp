#include "gts/losses.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace gts {

namespace {

void check_unit_open(double prediction) {
  if (!(prediction > 0.0 && prediction < 1.0)) {
    std::ostringstream msg;
    msg << "log loss undefined at prediction " << prediction;
    throw std::domain_error(msg.str());
  }
}

// ln(a/b) computed as log1p((a-b)/b); accurate when a and b are close.
double log_ratio(double a, double b) { return std::log1p((a - b) / b); }

}  // namespace

void validate(const LossSpec& spec) {
  if (spec.kind == LossKind::kNormalizedLog && !(spec.beta > 0.0)) {
    throw std::invalid_argument("normalized-log loss requires beta > 0");
  }
}

const char* loss_kind_name(LossKind kind) {
  switch (kind) {
    case LossKind::kSquare:
      return "square";
    case LossKind::kNormalizedLog:
      return "normalized-log";
    case LossKind::kRawLog:
      return "raw-log";
  }
  return "unknown";
}

double loss_eval(const LossSpec& spec, double prediction, int reward) {
  switch (spec.kind) {
    case LossKind::kSquare: {
      const double diff = prediction - static_cast<double>(reward);
      return diff * diff;
    }
    case LossKind::kNormalizedLog:
      check_unit_open(prediction);
      return (reward == 1 ? -std::log(prediction) : -std::log1p(-prediction)) / spec.beta;
    case LossKind::kRawLog:
      check_unit_open(prediction);
      return reward == 1 ? -std::log(prediction) : -std::log1p(-prediction);
  }
  throw std::logic_error("unknown loss kind");
}

double shifted_loss(const LossSpec& spec, double f_i, double f_1, int reward) {
  return loss_eval(spec, f_i, reward) - loss_eval(spec, f_1, reward);
}

double expected_shifted_loss(const LossSpec& spec, double f_i, double f_1) {
  switch (spec.kind) {
    case LossKind::kSquare: {
      const double gap = f_i - f_1;
      return gap * gap;
    }
    case LossKind::kNormalizedLog:
      return kl_bernoulli(f_1, f_i) / spec.beta;
    case LossKind::kRawLog:
      return kl_bernoulli(f_1, f_i);
  }
  throw std::logic_error("unknown loss kind");
}

double second_moment_shifted_loss(const LossSpec& spec, double f_i, double f_1) {
  switch (spec.kind) {
    case LossKind::kSquare: {
      // shifted loss factors as (f_i - f_1)(f_i + f_1 - 2r) for r in {0, 1}
      const double gap = f_i - f_1;
      const double s = f_i + f_1;
      return gap * gap * (f_1 * (s - 2.0) * (s - 2.0) + (1.0 - f_1) * s * s);
    }
    case LossKind::kNormalizedLog:
    case LossKind::kRawLog: {
      check_unit_open(f_i);
      check_unit_open(f_1);
      const double lr1 = log_ratio(f_1, f_i);
      const double lr0 = log_ratio(1.0 - f_1, 1.0 - f_i);
      const double beta = spec.kind == LossKind::kNormalizedLog ? spec.beta : 1.0;
      return (f_1 * lr1 * lr1 + (1.0 - f_1) * lr0 * lr0) / (beta * beta);
    }
  }
  throw std::logic_error("unknown loss kind");
}

double kl_bernoulli(double p, double q) {
  if (!(p >= 0.0 && p <= 1.0)) {
    std::ostringstream msg;
    msg << "kl_bernoulli: p = " << p << " outside [0, 1]";
    throw std::invalid_argument(msg.str());
  }
  if (!(q > 0.0 && q < 1.0)) {
    std::ostringstream msg;
    msg << "kl_bernoulli: q = " << q << " must lie strictly inside (0, 1)";
    throw std::domain_error(msg.str());
  }
  double kl = 0.0;
  if (p > 0.0) kl += p * log_ratio(p, q);
  if (p < 1.0) kl += (1.0 - p) * log_ratio(1.0 - p, 1.0 - q);
  return kl;
}

BetaCompatReport validate_beta_compatibility(const ExpertSet& experts, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  BetaCompatReport report;
  const Expert& truth = experts.truth();
  for (int i = 0; i < experts.size(); ++i) {
    for (int x = 0; x < experts.num_contexts(); ++x) {
      for (int a = 0; a < experts.num_arms(); ++a) {
        const double f_1 = truth.prediction(x, a);
        const double f_i = experts[i].prediction(x, a);
        const double ratio = std::max(std::abs(std::log(f_1 / f_i)),
                                      std::abs(std::log((1.0 - f_1) / (1.0 - f_i))));
        if (ratio > report.max_abs_log_ratio) {
          report.max_abs_log_ratio = ratio;
          report.worst_expert = i;
          report.worst_context = x;
          report.worst_arm = a;
        }
      }
    }
  }
  report.min_admissible_beta = 2.0 * report.max_abs_log_ratio;
  report.pass = report.max_abs_log_ratio <= beta / 2.0;
  return report;
}

}  // namespace gts
