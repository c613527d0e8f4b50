#include "gts/simulate.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace gts {

namespace {

constexpr std::uint64_t kBayesDrawSalt = 0x6a09e667f3bcc909ULL;

void validate_run_config(const ExpertSet& experts, const RunConfig& cfg) {
  if (cfg.horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  validate(cfg.loss);
  if (static_cast<int>(cfg.prior.size()) != experts.size()) {
    std::ostringstream msg;
    msg << "prior length " << cfg.prior.size() << " does not match " << experts.size()
        << " experts";
    throw std::invalid_argument(msg.str());
  }
  if (cfg.snapshot_weights && cfg.snapshot_stride < 1) {
    throw std::invalid_argument("snapshot stride must be at least 1");
  }
}

// Runs fn(0) .. fn(n - 1) on up to `parallelism` threads. Work is striped by
// index; callers store results by index so merge order is deterministic.
void parallel_for(int n, int parallelism, const std::function<void(int)>& fn) {
  const int workers = std::max(1, std::min(parallelism, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  threads.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        for (int i = w; i < n; i += workers) fn(i);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

RegretEstimate summarize(std::vector<double> finals) {
  RegretEstimate est;
  est.num_seeds = static_cast<int>(finals.size());
  double sum = 0.0;
  for (double v : finals) sum += v;
  est.mean = sum / est.num_seeds;
  double sq = 0.0;
  for (double v : finals) sq += (v - est.mean) * (v - est.mean);
  est.std_error = est.num_seeds > 1 ? std::sqrt(sq / (est.num_seeds - 1) / est.num_seeds) : 0.0;
  est.ci_low = est.mean - 1.96 * est.std_error;
  est.ci_high = est.mean + 1.96 * est.std_error;
  est.per_seed_final = std::move(finals);
  return est;
}

}  // namespace

RunTrace run_episode(const Environment& env, const ExpertSet& experts, const RunConfig& cfg) {
  validate_run_config(experts, cfg);
  verify_realizability(experts, env);

  const int num_experts = experts.size();
  const int num_arms = env.num_arms();
  const int num_contexts = env.num_contexts();

  // Greedy arms never change within a run; resolve them once.
  std::vector<int> greedy(static_cast<std::size_t>(num_experts) * num_contexts);
  for (int i = 0; i < num_experts; ++i) {
    for (int x = 0; x < num_contexts; ++x) {
      greedy[static_cast<std::size_t>(i) * num_contexts + x] = experts[i].greedy_arm(x);
    }
  }
  std::vector<int> best(static_cast<std::size_t>(num_contexts));
  for (int x = 0; x < num_contexts; ++x) best[static_cast<std::size_t>(x)] = env.best_arm(x);

  WeightState state(cfg.prior, cfg.eta, cfg.gamma);
  Rng rng(mix_seeds(env.rng_seed(), cfg.seed));

  RunTrace trace;
  trace.steps.reserve(static_cast<std::size_t>(cfg.horizon));
  std::vector<double> probs(static_cast<std::size_t>(num_arms));
  std::vector<double> losses(static_cast<std::size_t>(num_experts));

  for (std::int64_t t = 0; t < cfg.horizon; ++t) {
    try {
      const int x = env.context_at(t, rng);
      const std::vector<double> weights = state.normalized();

      probs.assign(static_cast<std::size_t>(num_arms), cfg.gamma / num_arms);
      for (int i = 0; i < num_experts; ++i) {
        probs[static_cast<std::size_t>(greedy[static_cast<std::size_t>(i) * num_contexts + x])] +=
            (1.0 - cfg.gamma) * weights[static_cast<std::size_t>(i)];
      }
      int arm = num_arms - 1;
      {
        const double u = rng.uniform();
        double cumulative = 0.0;
        for (int a = 0; a < num_arms; ++a) {
          cumulative += probs[static_cast<std::size_t>(a)];
          if (u < cumulative) {
            arm = a;
            break;
          }
        }
      }
      const int reward = env.sample_reward(x, arm, rng);

      const double truth_loss = loss_eval(cfg.loss, experts.truth().prediction(x, arm), reward);
      double avg_shifted = 0.0;
      for (int i = 0; i < num_experts; ++i) {
        losses[static_cast<std::size_t>(i)] =
            loss_eval(cfg.loss, experts[i].prediction(x, arm), reward);
        avg_shifted += weights[static_cast<std::size_t>(i)] *
                       (losses[static_cast<std::size_t>(i)] - truth_loss);
      }

      if (cfg.snapshot_weights && t % cfg.snapshot_stride == 0) {
        trace.snapshot_steps.push_back(t);
        trace.weight_snapshots.push_back(weights);
      }

      state.update(losses);
      trace.steps.push_back(
          {x, arm, reward,
           env.mu()(x, best[static_cast<std::size_t>(x)]) - env.mu()(x, arm), avg_shifted});
    } catch (const std::exception& e) {
      std::ostringstream msg;
      msg << "run_episode failed at step " << t << ": " << e.what();
      throw std::runtime_error(msg.str());
    }
  }
  trace.final_weights = state.normalized();
  return trace;
}

std::vector<double> cumulative_regret(const RunTrace& trace) {
  std::vector<double> out;
  out.reserve(trace.steps.size());
  double total = 0.0;
  for (const StepRecord& step : trace.steps) {
    total += step.regret_increment;
    out.push_back(total);
  }
  return out;
}

double average_shifted_loss_total(const RunTrace& trace) {
  double total = 0.0;
  for (const StepRecord& step : trace.steps) total += step.avg_shifted_loss;
  return total;
}

RegretEstimate mean_regret(const Environment& env, const ExpertSet& experts, const RunConfig& cfg,
                           int num_seeds, int parallelism) {
  if (num_seeds < 2) throw std::invalid_argument("mean_regret needs at least 2 seeds");
  std::vector<double> finals(static_cast<std::size_t>(num_seeds));
  parallel_for(num_seeds, parallelism, [&](int k) {
    RunConfig local = cfg;
    local.seed = cfg.seed + static_cast<std::uint64_t>(k);
    local.snapshot_weights = false;
    const RunTrace trace = run_episode(env, experts, local);
    double total = 0.0;
    for (const StepRecord& step : trace.steps) total += step.regret_increment;
    finals[static_cast<std::size_t>(k)] = total;
  });
  return summarize(std::move(finals));
}

double lemma1_bound(double kappa2, double p1) {
  if (!(kappa2 > 0.0)) throw std::invalid_argument("kappa2 must be positive");
  if (!(p1 > 0.0 && p1 <= 1.0)) throw std::invalid_argument("p1 must lie in (0, 1]");
  return 4.0 * (std::numbers::e - 2.0) * kappa2 * std::log(1.0 / p1);
}

double corollary1_bound(double kappa1, double kappa2, double gamma, std::int64_t horizon,
                        double p1) {
  if (!(p1 > 0.0 && p1 <= 1.0)) throw std::invalid_argument("p1 must lie in (0, 1]");
  return corollary2_bound(kappa1, kappa2, gamma, horizon, std::log(1.0 / p1));
}

double corollary2_bound(double kappa1, double kappa2, double gamma, std::int64_t horizon,
                        double entropy_plus_kl) {
  if (!(kappa1 > 0.0) || !(kappa2 > 0.0)) {
    throw std::invalid_argument("kappa1 and kappa2 must be positive");
  }
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in (0, 1]");
  if (horizon < 1) throw std::invalid_argument("horizon must be positive");
  if (!(entropy_plus_kl >= 0.0)) throw std::invalid_argument("entropy term must be nonnegative");
  const double t = static_cast<double>(horizon);
  return std::sqrt(4.0 * kappa2 * (std::numbers::e - 2.0)) * kappa1 * (1.0 - gamma) *
             std::sqrt(t * entropy_plus_kl) +
         gamma * t;
}

double square_loss_kappa1(int num_arms, double gamma) {
  if (num_arms < 1) throw std::invalid_argument("need at least one arm");
  if (!(gamma > 0.0)) throw std::invalid_argument("kappa1 for square loss requires gamma > 0");
  return std::sqrt(2.0 * num_arms / gamma);
}

double log_loss_kappa1(int num_arms, double beta, double gamma) {
  if (num_arms < 1) throw std::invalid_argument("need at least one arm");
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  if (!(gamma > 0.0)) throw std::invalid_argument("kappa1 for log loss requires gamma > 0");
  return num_arms * std::sqrt(2.0 * beta / gamma);
}

double entropy(std::span<const double> p) {
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log(v);
  }
  return h;
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw std::invalid_argument("distribution sizes differ");
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) return std::numeric_limits<double>::infinity();
    kl += p[i] * std::log(p[i] / q[i]);
  }
  return kl;
}

BoundReport make_bound_report(const LossSpec& loss, int num_arms, double gamma,
                              std::int64_t horizon, std::span<const double> prior,
                              int truth_index, double kappa2,
                              std::span<const double> true_prior) {
  if (loss.kind == LossKind::kRawLog) {
    throw std::invalid_argument("raw-log loss carries no regret bounds");
  }
  BoundReport report;
  report.kappa2 = kappa2;
  report.kappa1 = loss.kind == LossKind::kSquare
                      ? square_loss_kappa1(num_arms, gamma)
                      : log_loss_kappa1(num_arms, loss.beta, gamma);
  const double p1 = prior[static_cast<std::size_t>(truth_index)];
  report.lemma1 = lemma1_bound(kappa2, p1);
  report.corollary1 = corollary1_bound(report.kappa1, kappa2, gamma, horizon, p1);
  const std::span<const double> pstar = true_prior.empty() ? prior : true_prior;
  report.entropy = entropy(pstar);
  report.kl_prior = kl_divergence(pstar, prior);
  report.corollary2 = corollary2_bound(report.kappa1, kappa2, gamma, horizon,
                                       report.entropy + report.kl_prior);
  return report;
}

BayesResult bayes_regret_experiment(const Environment& env, const ExpertSet& experts,
                                    const RunConfig& cfg, const BayesConfig& bayes,
                                    double kappa1, double kappa2, int parallelism) {
  if (bayes.num_draws < 1) throw std::invalid_argument("need at least one Bayes draw");
  if (static_cast<int>(bayes.true_prior.size()) != experts.size()) {
    throw std::invalid_argument("true prior length does not match expert count");
  }
  double sum = 0.0;
  for (double v : bayes.true_prior) {
    if (!(v >= 0.0)) throw std::invalid_argument("true prior entries must be nonnegative");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw std::invalid_argument("true prior must sum to 1 within 1e-12");
  }

  BayesResult result;
  Rng draw_rng(mix_seeds(cfg.seed, kBayesDrawSalt));
  for (int d = 0; d < bayes.num_draws; ++d) {
    const double u = draw_rng.uniform();
    double cumulative = 0.0;
    int drawn = experts.size() - 1;
    for (int i = 0; i < experts.size(); ++i) {
      cumulative += bayes.true_prior[static_cast<std::size_t>(i)];
      if (u < cumulative) {
        drawn = i;
        break;
      }
    }
    result.drawn_truth_indices.push_back(drawn);
  }

  for (int drawn : result.drawn_truth_indices) {
    const Environment relabeled(experts[drawn].predictions(), env.source(), env.rng_seed());
    const ExpertSet relabeled_experts(experts.experts(), drawn);
    const RegretEstimate est =
        mean_regret(relabeled, relabeled_experts, cfg, bayes.num_seeds_per_draw, parallelism);
    result.per_draw_mean_regret.push_back(est.mean);
  }

  RegretEstimate overall = summarize(result.per_draw_mean_regret);
  result.regret = std::move(overall);

  result.entropy_true_prior = entropy(bayes.true_prior);
  result.kl_true_vs_algorithm = kl_divergence(bayes.true_prior, cfg.prior);
  if (std::isfinite(kappa1) && std::isfinite(kappa2)) {
    result.corollary2 =
        corollary2_bound(kappa1, kappa2, cfg.gamma, cfg.horizon,
                         result.entropy_true_prior + result.kl_true_vs_algorithm);
  } else {
    result.corollary2 = std::numeric_limits<double>::quiet_NaN();
  }
  return result;
}

}  // namespace gts
