#include "gts/bandit.hpp"

#include <sstream>
#include <stdexcept>
#include <utility>

namespace gts {

namespace {

void check_dims(int num_contexts, int num_arms) {
  if (num_contexts < 1 || num_arms < 1) {
    std::ostringstream msg;
    msg << "table dimensions must be positive, got " << num_contexts << " x " << num_arms;
    throw std::invalid_argument(msg.str());
  }
}

void check_context(int context, int num_contexts) {
  if (context < 0 || context >= num_contexts) {
    std::ostringstream msg;
    msg << "context " << context << " out of range [0, " << num_contexts << ")";
    throw std::out_of_range(msg.str());
  }
}

void check_arm(int arm, int num_arms) {
  if (arm < 0 || arm >= num_arms) {
    std::ostringstream msg;
    msg << "arm " << arm << " out of range [0, " << num_arms << ")";
    throw std::out_of_range(msg.str());
  }
}

int greedy_over_row(std::span<const double> row) {
  int best = 0;
  for (int a = 1; a < static_cast<int>(row.size()); ++a) {
    if (row[a] > row[best]) best = a;
  }
  return best;
}

}  // namespace

Table::Table(int num_contexts, int num_arms, double fill)
    : num_contexts_(num_contexts),
      num_arms_(num_arms),
      values_(static_cast<std::size_t>(num_contexts) * num_arms, fill) {
  check_dims(num_contexts, num_arms);
}

Table Table::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty() || rows.front().empty()) {
    throw std::invalid_argument("table rows must be non-empty");
  }
  Table table(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
  for (int x = 0; x < table.num_contexts(); ++x) {
    if (rows[x].size() != rows.front().size()) {
      std::ostringstream msg;
      msg << "table row " << x << " has length " << rows[x].size() << ", expected "
          << rows.front().size();
      throw std::invalid_argument(msg.str());
    }
    for (int a = 0; a < table.num_arms(); ++a) table(x, a) = rows[x][a];
  }
  return table;
}

std::span<const double> Table::row(int context) const {
  check_context(context, num_contexts_);
  return {values_.data() + static_cast<std::size_t>(context) * num_arms_,
          static_cast<std::size_t>(num_arms_)};
}

Expert::Expert(Table predictions, double margin) : predictions_(std::move(predictions)) {
  if (!(margin > 0.0 && margin < 0.5)) {
    throw std::invalid_argument("prediction margin must be in (0, 0.5)");
  }
  check_dims(predictions_.num_contexts(), predictions_.num_arms());
  for (int x = 0; x < predictions_.num_contexts(); ++x) {
    for (int a = 0; a < predictions_.num_arms(); ++a) {
      const double f = predictions_(x, a);
      if (!(f >= margin && f <= 1.0 - margin)) {
        std::ostringstream msg;
        msg << "prediction at (context " << x << ", arm " << a << ") = " << f
            << " outside [" << margin << ", " << 1.0 - margin << "]";
        throw std::invalid_argument(msg.str());
      }
    }
  }
}

int Expert::greedy_arm(int context) const {
  check_context(context, predictions_.num_contexts());
  return greedy_over_row(predictions_.row(context));
}

double Expert::prediction(int context, int arm) const {
  check_context(context, predictions_.num_contexts());
  check_arm(arm, predictions_.num_arms());
  return predictions_(context, arm);
}

ExpertSet::ExpertSet(std::vector<Expert> experts, int truth_index)
    : experts_(std::move(experts)), truth_index_(truth_index) {
  if (experts_.empty()) throw std::invalid_argument("expert set must hold at least one expert");
  if (truth_index_ < 0 || truth_index_ >= size()) {
    throw std::invalid_argument("truth index out of range");
  }
  const int num_contexts = experts_.front().num_contexts();
  const int num_arms = experts_.front().num_arms();
  for (int i = 1; i < size(); ++i) {
    if (experts_[static_cast<std::size_t>(i)].num_contexts() != num_contexts ||
        experts_[static_cast<std::size_t>(i)].num_arms() != num_arms) {
      std::ostringstream msg;
      msg << "expert " << i << " table dimensions differ from expert 0";
      throw std::invalid_argument(msg.str());
    }
  }
}

Environment::Environment(Table mu, ContextSource source, std::uint64_t rng_seed)
    : mu_(std::move(mu)), source_(std::move(source)), rng_seed_(rng_seed) {
  check_dims(mu_.num_contexts(), mu_.num_arms());
  for (int x = 0; x < mu_.num_contexts(); ++x) {
    for (int a = 0; a < mu_.num_arms(); ++a) {
      const double m = mu_(x, a);
      if (!(m > 0.0 && m < 1.0)) {
        std::ostringstream msg;
        msg << "mu at (context " << x << ", arm " << a << ") = " << m
            << " must lie strictly inside (0, 1)";
        throw std::invalid_argument(msg.str());
      }
    }
  }
  if (source_.kind == ContextSource::Kind::kExplicitSequence) {
    if (source_.sequence.empty()) {
      throw std::invalid_argument("explicit context sequence must be non-empty");
    }
    for (std::size_t t = 0; t < source_.sequence.size(); ++t) {
      if (source_.sequence[t] < 0 || source_.sequence[t] >= mu_.num_contexts()) {
        std::ostringstream msg;
        msg << "context sequence entry " << t << " = " << source_.sequence[t]
            << " out of range [0, " << mu_.num_contexts() << ")";
        throw std::invalid_argument(msg.str());
      }
    }
  }
}

int Environment::context_at(std::int64_t step, Rng& rng) const {
  switch (source_.kind) {
    case ContextSource::Kind::kIidUniform:
      return rng.uniform_int(mu_.num_contexts());
    case ContextSource::Kind::kFixedCycle:
      return static_cast<int>(step % mu_.num_contexts());
    case ContextSource::Kind::kExplicitSequence:
      return source_.sequence[static_cast<std::size_t>(
          step % static_cast<std::int64_t>(source_.sequence.size()))];
  }
  throw std::logic_error("unknown context source kind");
}

int Environment::sample_reward(int context, int arm, Rng& rng) const {
  check_context(context, mu_.num_contexts());
  check_arm(arm, mu_.num_arms());
  return rng.bernoulli(mu_(context, arm));
}

int Environment::best_arm(int context) const {
  check_context(context, mu_.num_contexts());
  return greedy_over_row(mu_.row(context));
}

int binarize_reward(double reward, Rng& rng) {
  if (!(reward >= 0.0 && reward <= 1.0)) {
    std::ostringstream msg;
    msg << "reward " << reward << " outside [0, 1]";
    throw std::invalid_argument(msg.str());
  }
  return rng.bernoulli(reward);
}

void verify_realizability(const ExpertSet& experts, const Environment& env) {
  const Expert& truth = experts.truth();
  if (truth.num_contexts() != env.num_contexts() || truth.num_arms() != env.num_arms()) {
    throw std::invalid_argument("truth expert dimensions differ from environment");
  }
  if (!(truth.predictions() == env.mu())) {
    for (int x = 0; x < env.num_contexts(); ++x) {
      for (int a = 0; a < env.num_arms(); ++a) {
        if (truth.predictions()(x, a) != env.mu()(x, a)) {
          std::ostringstream msg;
          msg << "truth expert disagrees with mu at (context " << x << ", arm " << a
              << "): " << truth.predictions()(x, a) << " vs " << env.mu()(x, a);
          throw std::invalid_argument(msg.str());
        }
      }
    }
  }
}

}  // namespace gts
