#pragma once

#include <vector>

#include "gts/bandit.hpp"
#include "gts/losses.hpp"
#include "gts/policy.hpp"

namespace gts {

// Numerical verdicts on the four conditions a loss function must satisfy for
// the regret analysis: consistency (C1), informativeness (C2), boundedness
// (C3), and self-boundedness (C4). For raw-log loss C3/C4 are reported but
// not asserted (bounds_checked = false); the loss exists only for the
// Thompson Sampling special case.
struct ConditionReport {
  double c1_min_expected = 0.0;
  double c2_max_ratio_floor = 0.0;
  double c2_max_ratio_realized = 0.0;  // NaN without a supplied weight state
  double c2_kappa1_required = 0.0;     // max of the measured ratios
  double c2_kappa1_analytic = 0.0;
  double c3_max_abs = 0.0;
  double c4_kappa2_estimate = 0.0;
  bool pass_c1 = false;
  bool pass_c2 = false;
  bool pass_c3 = false;
  bool pass_c4 = false;
  bool bounds_checked = true;

  bool all_pass() const {
    return pass_c1 && pass_c2 && (!bounds_checked || (pass_c3 && pass_c4));
  }
};

// Minimum over (expert, context, arm) of the expected shifted loss; exact
// two-point expectation since rewards are binary. C1 demands this be >= 0.
double check_consistency(const ExpertSet& experts, const Environment& env, const LossSpec& spec);

struct InformativenessReport {
  double max_ratio_floor = 0.0;     // worst-case arm distribution: mass gamma/K per arm
  double max_ratio_realized = 0.0;  // NaN without a supplied weight state
  double kappa1_analytic = 0.0;
  bool pass = false;
};

// Largest ratio Delta_i(x) / sqrt(E_{r,a|x}[shifted loss]) over experts and
// contexts, skipping zero denominators. Evaluated against the floor-only arm
// distribution (each arm weighted gamma/K) and, when a weight state is
// supplied, the realized mixture distribution.
InformativenessReport verify_informativeness(const ExpertSet& experts, const Environment& env,
                                             const LossSpec& spec, double gamma,
                                             const WeightState* state = nullptr);

// Sup over a (f_1, f_i) grid of second moment / first moment of the shifted
// loss, skipping cells with first moment <= 1e-15. The grid has `resolution`
// points per axis at step 1 / (resolution + 1); normalized-log grids keep
// only beta-admissible cells. Throws when no admissible cell remains.
double estimate_kappa2(const LossSpec& spec, int grid_resolution);

// Moments of the shifted log loss when the truth predicts f and the other
// expert predicts g, plus F = (M2 - M1^2) / M1, the variance-to-mean ratio.
struct AppendixPoint {
  double f = 0.0;
  double g = 0.0;
  double beta = 0.0;
  double m1 = 0.0;
  double m2 = 0.0;
  double ratio = 0.0;  // F(g); the analytic limit 2/beta at g = f
  bool limit = false;  // true when the limit value was substituted
};

AppendixPoint appendix_F(double f, double g, double beta);

struct FSweep {
  std::vector<AppendixPoint> points;
  double g_low = 0.0;   // beta-admissible range around f
  double g_high = 0.0;
  double sup_ratio = 0.0;
  double g_at_sup = 0.0;
  bool sup_at_boundary = false;
  double valley_g = 0.0;  // grid argmin of F
  // Fraction of adjacent grid pairs violating the decrease-then-increase
  // profile around the valley.
  double monotonicity_violations = 0.0;
};

// Evaluates F over `resolution` evenly spaced points of the beta-admissible
// g-range around f.
FSweep sweep_F(double f, double beta, int resolution);

// Runs all four condition checks on a concrete instance.
ConditionReport check_conditions(const ExpertSet& experts, const Environment& env,
                                 const LossSpec& spec, double gamma, int grid_resolution,
                                 const WeightState* state = nullptr);

}  // namespace gts
