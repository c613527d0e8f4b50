#pragma once

#include <cassert>
#include <cstdint>
#include <span>
#include <vector>

#include "gts/random.hpp"

namespace gts {

// Dense table holding one value per (context, arm) pair.
class Table {
 public:
  Table() = default;
  Table(int num_contexts, int num_arms, double fill = 0.0);

  // Builds a table from per-context rows; all rows must have equal length.
  static Table from_rows(const std::vector<std::vector<double>>& rows);

  double operator()(int context, int arm) const {
    assert(context >= 0 && context < num_contexts_);
    assert(arm >= 0 && arm < num_arms_);
    return values_[static_cast<std::size_t>(context) * num_arms_ + arm];
  }
  double& operator()(int context, int arm) {
    assert(context >= 0 && context < num_contexts_);
    assert(arm >= 0 && arm < num_arms_);
    return values_[static_cast<std::size_t>(context) * num_arms_ + arm];
  }

  std::span<const double> row(int context) const;

  int num_contexts() const { return num_contexts_; }
  int num_arms() const { return num_arms_; }
  const std::vector<double>& values() const { return values_; }

  friend bool operator==(const Table&, const Table&) = default;

 private:
  int num_contexts_ = 0;
  int num_arms_ = 0;
  std::vector<double> values_;
};

inline constexpr double kDefaultPredictionMargin = 1e-4;

// A reward predictor f(x, a) together with the greedy arm policy it induces.
// Predictions must lie in [margin, 1 - margin] so the log loss stays finite.
class Expert {
 public:
  explicit Expert(Table predictions, double margin = kDefaultPredictionMargin);

  // Arm maximizing f(context, .); ties broken by smallest arm id.
  int greedy_arm(int context) const;

  double prediction(int context, int arm) const;
  const Table& predictions() const { return predictions_; }
  int num_contexts() const { return predictions_.num_contexts(); }
  int num_arms() const { return predictions_.num_arms(); }

 private:
  Table predictions_;
};

// Ordered set of experts sharing table dimensions. `truth_index` names the
// expert whose predictions equal the environment's mean rewards exactly.
class ExpertSet {
 public:
  explicit ExpertSet(std::vector<Expert> experts, int truth_index = 0);

  int size() const { return static_cast<int>(experts_.size()); }
  const Expert& operator[](int i) const { return experts_[static_cast<std::size_t>(i)]; }
  const std::vector<Expert>& experts() const { return experts_; }

  int truth_index() const { return truth_index_; }
  const Expert& truth() const { return experts_[static_cast<std::size_t>(truth_index_)]; }

  int num_contexts() const { return experts_.front().num_contexts(); }
  int num_arms() const { return experts_.front().num_arms(); }

 private:
  std::vector<Expert> experts_;
  int truth_index_;
};

// How contexts arrive over time. Fixed-cycle and explicit sequences are
// deterministic and consume no RNG draws; iid-uniform consumes one per step.
struct ContextSource {
  enum class Kind { kIidUniform, kFixedCycle, kExplicitSequence };
  Kind kind = Kind::kIidUniform;
  std::vector<int> sequence;  // kExplicitSequence only; cycled past its end
};

// Stochastic environment: mean-reward table, context stream, and the seed of
// its random stream. Rewards are Bernoulli(mu(x, a)).
class Environment {
 public:
  Environment(Table mu, ContextSource source = {}, std::uint64_t rng_seed = 0);

  int num_contexts() const { return mu_.num_contexts(); }
  int num_arms() const { return mu_.num_arms(); }
  const Table& mu() const { return mu_; }
  const ContextSource& source() const { return source_; }
  std::uint64_t rng_seed() const { return rng_seed_; }

  // Context for step `step` (0-based). Consumes one draw for iid-uniform
  // sources, none otherwise.
  int context_at(std::int64_t step, Rng& rng) const;

  // Binary reward, 1 with probability mu(context, arm). One RNG draw.
  int sample_reward(int context, int arm, Rng& rng) const;

  // Arm maximizing mu(context, .); ties broken by smallest arm id.
  int best_arm(int context) const;

 private:
  Table mu_;
  ContextSource source_;
  std::uint64_t rng_seed_;
};

// Converts a real-valued reward in [0, 1] into a binary pseudo-reward:
// 1 with probability `reward`, else 0. One RNG draw; the endpoints 0 and 1
// come out deterministic.
int binarize_reward(double reward, Rng& rng);

// Throws unless the truth expert's table equals the environment's mu exactly.
void verify_realizability(const ExpertSet& experts, const Environment& env);

}  // namespace gts
