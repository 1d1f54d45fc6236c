#ifndef PES_SOLVERS_HPP
#define PES_SOLVERS_HPP

#include <cstdint>
#include <random>
#include <vector>

#include "pes/metrics.hpp"
#include "pes/problems.hpp"

namespace pes {

enum class UpdateVariant { kOgda, kSgda, kAdagrad };

/// Geometric epoch schedule: eta_k = eta0 * decay^(k-1),
/// T_k = ceil(T0 * growth^(k-1)), k = 1..K. For theorem-built schedules
/// decay * growth = 1, so eta_k * T_k is constant up to rounding.
struct Schedule {
  double gamma = 0.0;
  double eta0 = 0.0;
  double decay = 1.0;
  std::int64_t T0 = 1;
  double growth = 1.0;
  int K = 1;
  Regime regime = Regime::kManual;

  double eta(int k) const;
  std::int64_t length(int k) const;
  /// Un-rounded T0 * growth^(k-1); the adaptive variant reads its
  /// stopping-rule budget M_k from here.
  double length_real(int k) const;
};

/// Parameters of the adaptive (dual-averaging) epoch subroutine.
/// m = 0 means "derive 1/sqrt(d+d') from the problem"; cap_T = 0 means
/// "100x the epoch's budget M_k".
struct AdaGradParams {
  double delta = 1e-6;
  double alpha_growth = 0.5;
  double m = 0.0;
  std::int64_t cap_T = 0;
};

struct PesConfig {
  UpdateVariant variant = UpdateVariant::kOgda;
  Schedule schedule;
  int batch_size = 1;
  std::uint64_t seed = 0;
  bool has_adagrad = false;  // must be true iff variant == kAdagrad
  AdaGradParams adagrad;
  double slack_T = 1.0;      // multiplier on every epoch length
  std::int64_t budget = 0;   // max oracle calls, 0 = unlimited
  PrimalDualPoint init;      // empty vectors -> ones(x), zeros(y)
};

/// One row per epoch. Gap fields are NaN when the problem lacks the
/// closed forms needed to compute them.
struct EpochTrace {
  int epoch = 0;
  double eta = 0.0;
  std::int64_t T = 0;             // steps actually taken this epoch
  std::int64_t oracle_calls = 0;  // cumulative
  double objective_gap = std::numeric_limits<double>::quiet_NaN();
  double gap_k = std::numeric_limits<double>::quiet_NaN();
  double delta_k = std::numeric_limits<double>::quiet_NaN();
  double elapsed_s = 0.0;  // cumulative wall time
  bool early_stop = false; // budget exhausted during/before this epoch
  bool capped = false;     // adaptive stopping rule hit its cap
  PrimalDualPoint point;   // epoch output (the averaged iterate)
};

/// Per-coordinate accumulator for the adaptive subroutine:
/// s_i = ||g_{1:t,i}||_2 and the running sum of operator-form gradients.
struct AdaGradState {
  Vector s;
  Vector grad_sum;
  std::int64_t t = 0;

  explicit AdaGradState(Eigen::Index dim)
      : s(Vector::Zero(dim)), grad_sum(Vector::Zero(dim)) {}
  void accumulate(const Vector& g);
};

/// Optimistic update with extrapolation. The leading gradient of step t
/// reuses the sample drawn at step t-1's extrapolation, so an epoch of
/// length T consumes T+1 oracle calls. Returns the uniform average of
/// z_1..z_T. The caller passes the (already anchored) objective.
PrimalDualPoint ogda_epoch(const SaddleProblem& prob,
                           const PrimalDualPoint& z0, double eta,
                           std::int64_t T, std::mt19937_64& rng,
                           int batch_size = 1);

/// Plain descent-ascent with the quadratic anchor at z0.x folded into the
/// primal proximal step; operates on the raw objective. T oracle calls.
PrimalDualPoint sgda_epoch(const SaddleProblem& prob,
                           const PrimalDualPoint& z0, double eta,
                           std::int64_t T, double gamma,
                           std::mt19937_64& rng, int batch_size = 1);

struct AdagradEpochResult {
  PrimalDualPoint average;
  std::int64_t steps = 0;
  bool capped = false;
};

/// Adaptive dual-averaging epoch: z_{t+1,i} = z0_i - eta * grad_sum_i /
/// (delta + s_i), dual block projected onto Y under the (delta + s)-
/// weighted norm. Runs until t >= M * max{(delta + max_i s_i)/m,
/// m * sum_i s_i} or the cap. One oracle call per step.
AdagradEpochResult adagrad_epoch(const SaddleProblem& prob,
                                 const PrimalDualPoint& z0, double eta,
                                 double M, const AdaGradParams& params,
                                 std::mt19937_64& rng, int batch_size = 1);

/// Outer loop: K epochs, re-anchoring the regularizer at each epoch's
/// returned average and restarting the subroutine from it.
std::vector<EpochTrace> pes_solve(const SaddleProblem& prob,
                                  const PesConfig& config);

/// Step-size cap the analysis allows for each variant: 1/(2*sqrt(2)*ell)
/// for the optimistic and adaptive updates, 1/rho for plain descent-ascent.
double default_eta0(UpdateVariant variant, const ProblemConstants& constants);

/// gamma = 2*rho regime. Requires mu_pl > 0, rho > 0, eps0 > 0. eta0 above
/// the analysis cap is clamped down with a warning on stderr.
Schedule schedule_from_theorem1(const ProblemConstants& constants,
                                double eta0, double eps);

/// gamma = mu_pl/4 regime; requires 0 < rho <= mu_pl/8.
Schedule schedule_from_theorem2(const ProblemConstants& constants,
                                double eta0, double eps);

/// Schedule for the adaptive variant: halved decay exponent and
/// stopping-rule budgets M_k = (212 m / (eta0 min{rho, mu_y})) * growth^(k-1)
/// stored in T0/growth. dim_total = d + d' fixes the default m.
Schedule schedule_adagrad(const ProblemConstants& constants, double eta0,
                          double eps, Eigen::Index dim_total, double m = 0.0);

struct StocAgdaConfig {
  double tau1 = 1.0;    // dual step numerator
  double tau2 = 5.0;    // primal step numerator
  double lambda = 1e3;  // step denominator offset
  std::int64_t T = 0;   // total iterations
  std::int64_t stride = 100;
  std::uint64_t seed = 0;
  int batch_size = 1;
  PrimalDualPoint init;
};

struct StocAgdaSample {
  std::int64_t t = 0;
  std::int64_t oracle_calls = 0;
  double objective_gap = std::numeric_limits<double>::quiet_NaN();
};

struct StocAgdaResult {
  std::vector<StocAgdaSample> samples;
  PrimalDualPoint final_point;
  std::int64_t oracle_calls = 0;
};

/// Two-timescale alternating baseline: x step with tau2/(lambda+t), then
/// y step with tau1/(lambda+t) evaluated at the updated x. Two oracle
/// calls per iteration; the objective gap is recorded every stride steps.
StocAgdaResult stoc_agda(const SaddleProblem& prob,
                         const StocAgdaConfig& config);

}  // namespace pes

#endif  // PES_SOLVERS_HPP
