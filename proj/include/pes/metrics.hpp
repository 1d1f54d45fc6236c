#ifndef PES_METRICS_HPP
#define PES_METRICS_HPP

#include <random>

#include "pes/problems.hpp"

namespace pes {

/// Which Lyapunov weighting a schedule's analysis regime prescribes.
enum class Regime { kTheorem1, kTheorem2, kManual };

/// How a gap value was obtained.
enum class GapMethod { kClosedForm, kNumericInnerSolve };

/// Bundle of gap diagnostics at a point. Absent values are NaN.
struct GapReport {
  double primal_gap = std::numeric_limits<double>::quiet_NaN();
  double duality_gap = std::numeric_limits<double>::quiet_NaN();
  double gap_k = std::numeric_limits<double>::quiet_NaN();
  double delta_k = std::numeric_limits<double>::quiet_NaN();
  GapMethod method = GapMethod::kClosedForm;
};

/// P(x) - min P. Requires primal_value and primal_optimum.
double primal_gap(const SaddleProblem& prob, const Vector& x);

/// Duality gap of the anchored objective f + (gamma/2)||x - x0||^2 at z,
/// from closed-form best responses.
double gap_k(const SaddleProblem& prob, const PrimalDualPoint& z,
             const Vector& x0, double gamma);

/// Regime-weighted combination of the primal gap and gap_k.
double lyapunov_delta(Regime regime, const ProblemConstants& constants,
                      double primal_gap_val, double gap_k_val);

/// Independent gap oracle: solves the inner max/min numerically with
/// backtracking gradient steps, no closed forms involved. Throws on
/// nonconvergence within max_iters.
double numeric_inner_solve_gap(const SaddleProblem& prob,
                               const PrimalDualPoint& z, const Vector& x0,
                               double gamma, double tol = 1e-10,
                               long max_iters = 1000000);

/// Lower estimate of the PL constant of P over a sampled ball around the
/// minimizer: min ||grad P||^2 / (2 (P - P*)). Samples with vanishing gap
/// are skipped; throws if every sample is skipped.
double estimate_pl_constant(const SaddleProblem& prob, int sample_count,
                            double radius, std::mt19937_64& rng);

}  // namespace pes

#endif  // PES_METRICS_HPP
