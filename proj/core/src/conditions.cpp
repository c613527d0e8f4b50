#include "gts/conditions.hpp"

#include "gts/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace gts {

namespace {

constexpr double kZeroMoment = 1e-15;

double immediate_regret(const ExpertSet& experts, const Environment& env, int expert, int context) {
  const int best = env.best_arm(context);
  const int chosen = experts[expert].greedy_arm(context);
  return env.mu()(context, best) - env.mu()(context, chosen);
}

double effective_beta(const LossSpec& spec) {
  return spec.kind == LossKind::kNormalizedLog ? spec.beta : 1.0;
}

bool beta_admissible(double f_1, double f_i, double beta) {
  return std::abs(std::log(f_1 / f_i)) <= beta / 2.0 + 1e-12 &&
         std::abs(std::log((1.0 - f_1) / (1.0 - f_i))) <= beta / 2.0 + 1e-12;
}

}  // namespace

double check_consistency(const ExpertSet& experts, const Environment& env, const LossSpec& spec) {
  verify_realizability(experts, env);
  double min_expected = std::numeric_limits<double>::infinity();
  for (int i = 0; i < experts.size(); ++i) {
    for (int x = 0; x < env.num_contexts(); ++x) {
      for (int a = 0; a < env.num_arms(); ++a) {
        min_expected = std::min(
            min_expected, expected_shifted_loss(spec, experts[i].prediction(x, a), env.mu()(x, a)));
      }
    }
  }
  return min_expected;
}

InformativenessReport verify_informativeness(const ExpertSet& experts, const Environment& env,
                                             const LossSpec& spec, double gamma,
                                             const WeightState* state) {
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw std::invalid_argument("informativeness check requires gamma in (0, 1]");
  }
  verify_realizability(experts, env);
  const int num_arms = env.num_arms();

  InformativenessReport report;
  report.max_ratio_realized = std::numeric_limits<double>::quiet_NaN();
  report.kappa1_analytic = spec.kind == LossKind::kSquare
                               ? square_loss_kappa1(num_arms, gamma)
                               : log_loss_kappa1(num_arms, effective_beta(spec), gamma);

  for (int x = 0; x < env.num_contexts(); ++x) {
    std::vector<double> realized_probs;
    if (state != nullptr) realized_probs = arm_distribution(*state, experts, x).probs;
    for (int i = 0; i < experts.size(); ++i) {
      const double delta = immediate_regret(experts, env, i, x);
      double sum_expected = 0.0;
      double realized_expected = 0.0;
      for (int a = 0; a < num_arms; ++a) {
        const double e = expected_shifted_loss(spec, experts[i].prediction(x, a), env.mu()(x, a));
        sum_expected += e;
        if (state != nullptr) realized_expected += realized_probs[static_cast<std::size_t>(a)] * e;
      }
      const double floor_expected = gamma / num_arms * sum_expected;
      if (floor_expected > kZeroMoment) {
        report.max_ratio_floor =
            std::max(report.max_ratio_floor, delta / std::sqrt(floor_expected));
      }
      if (state != nullptr && realized_expected > kZeroMoment) {
        const double ratio = delta / std::sqrt(realized_expected);
        report.max_ratio_realized =
            std::isnan(report.max_ratio_realized) ? ratio
                                                  : std::max(report.max_ratio_realized, ratio);
      }
    }
  }
  double required = report.max_ratio_floor;
  if (!std::isnan(report.max_ratio_realized)) {
    required = std::max(required, report.max_ratio_realized);
  }
  report.pass = required <= report.kappa1_analytic + 1e-9;
  return report;
}

double estimate_kappa2(const LossSpec& spec, int grid_resolution) {
  validate(spec);
  if (grid_resolution < 1) throw std::invalid_argument("grid resolution must be at least 1");
  const double step = 1.0 / (grid_resolution + 1);
  const double beta = effective_beta(spec);
  const bool restrict = spec.kind != LossKind::kSquare;
  double sup = -std::numeric_limits<double>::infinity();
  for (int r = 1; r <= grid_resolution; ++r) {
    const double f_1 = r * step;
    for (int c = 1; c <= grid_resolution; ++c) {
      const double f_i = c * step;
      if (restrict && !beta_admissible(f_1, f_i, beta)) continue;
      const double expected = expected_shifted_loss(spec, f_i, f_1);
      if (expected <= kZeroMoment) continue;
      sup = std::max(sup, second_moment_shifted_loss(spec, f_i, f_1) / expected);
    }
  }
  if (!std::isfinite(sup)) {
    std::ostringstream msg;
    msg << "kappa2 grid (resolution " << grid_resolution
        << ") has no admissible cell with positive expected shifted loss";
    throw std::invalid_argument(msg.str());
  }
  return sup;
}

AppendixPoint appendix_F(double f, double g, double beta) {
  if (!(f > 0.0 && f < 1.0) || !(g > 0.0 && g < 1.0)) {
    throw std::invalid_argument("f and g must lie strictly inside (0, 1)");
  }
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  if (!beta_admissible(f, g, beta)) {
    std::ostringstream msg;
    msg << "log-ratios at (f = " << f << ", g = " << g << ") exceed beta/2 = " << beta / 2.0;
    throw std::invalid_argument(msg.str());
  }
  AppendixPoint point;
  point.f = f;
  point.g = g;
  point.beta = beta;
  const double lr1 = std::log1p((f - g) / g);
  const double lr0 = std::log1p((g - f) / (1.0 - g));
  point.m1 = (f * lr1 + (1.0 - f) * lr0) / beta;
  point.m2 = (f * lr1 * lr1 + (1.0 - f) * lr0 * lr0) / (beta * beta);
  if (point.m1 > 0.0) {
    point.ratio = (point.m2 - point.m1 * point.m1) / point.m1;
  } else {
    point.ratio = 2.0 / beta;
    point.limit = true;
  }
  return point;
}

FSweep sweep_F(double f, double beta, int resolution) {
  if (resolution < 2) throw std::invalid_argument("sweep resolution must be at least 2");
  if (!(f > 0.0 && f < 1.0)) throw std::invalid_argument("f must lie strictly inside (0, 1)");
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");

  FSweep sweep;
  const double half = std::exp(beta / 2.0);
  sweep.g_low = std::max(f / half, 1.0 - (1.0 - f) * half);
  sweep.g_high = std::min(f * half, 1.0 - (1.0 - f) / half);

  sweep.points.reserve(static_cast<std::size_t>(resolution));
  const double step = (sweep.g_high - sweep.g_low) / (resolution - 1);
  int sup_index = 0;
  int valley_index = 0;
  for (int j = 0; j < resolution; ++j) {
    const double g = j + 1 == resolution ? sweep.g_high : sweep.g_low + j * step;
    sweep.points.push_back(appendix_F(f, g, beta));
    if (sweep.points.back().ratio > sweep.points[static_cast<std::size_t>(sup_index)].ratio) {
      sup_index = j;
    }
    if (sweep.points.back().ratio < sweep.points[static_cast<std::size_t>(valley_index)].ratio) {
      valley_index = j;
    }
  }
  sweep.sup_ratio = sweep.points[static_cast<std::size_t>(sup_index)].ratio;
  sweep.g_at_sup = sweep.points[static_cast<std::size_t>(sup_index)].g;
  sweep.sup_at_boundary = sup_index == 0 || sup_index == resolution - 1;
  sweep.valley_g = sweep.points[static_cast<std::size_t>(valley_index)].g;

  int violations = 0;
  for (int j = 0; j + 1 < resolution; ++j) {
    const double lhs = sweep.points[static_cast<std::size_t>(j)].ratio;
    const double rhs = sweep.points[static_cast<std::size_t>(j + 1)].ratio;
    if (j < valley_index ? rhs > lhs + 1e-12 : rhs < lhs - 1e-12) ++violations;
  }
  sweep.monotonicity_violations = static_cast<double>(violations) / (resolution - 1);
  return sweep;
}

ConditionReport check_conditions(const ExpertSet& experts, const Environment& env,
                                 const LossSpec& spec, double gamma, int grid_resolution,
                                 const WeightState* state) {
  ConditionReport report;
  report.bounds_checked = spec.kind != LossKind::kRawLog;

  report.c1_min_expected = check_consistency(experts, env, spec);
  report.pass_c1 = report.c1_min_expected >= -1e-12;

  const InformativenessReport info = verify_informativeness(experts, env, spec, gamma, state);
  report.c2_max_ratio_floor = info.max_ratio_floor;
  report.c2_max_ratio_realized = info.max_ratio_realized;
  report.c2_kappa1_required = info.max_ratio_floor;
  if (!std::isnan(info.max_ratio_realized)) {
    report.c2_kappa1_required = std::max(report.c2_kappa1_required, info.max_ratio_realized);
  }
  report.c2_kappa1_analytic = info.kappa1_analytic;
  report.pass_c2 = info.pass;

  for (int i = 0; i < experts.size(); ++i) {
    for (int x = 0; x < env.num_contexts(); ++x) {
      for (int a = 0; a < env.num_arms(); ++a) {
        for (int r = 0; r <= 1; ++r) {
          report.c3_max_abs = std::max(
              report.c3_max_abs,
              std::abs(shifted_loss(spec, experts[i].prediction(x, a), env.mu()(x, a), r)));
        }
      }
    }
  }
  report.pass_c3 = report.c3_max_abs <= 1.0 + 1e-12;

  report.c4_kappa2_estimate = estimate_kappa2(spec, grid_resolution);
  report.pass_c4 = spec.kind == LossKind::kSquare
                       ? report.c4_kappa2_estimate <= 4.0 + 1e-9
                       : std::isfinite(report.c4_kappa2_estimate);
  return report;
}

}  // namespace gts
