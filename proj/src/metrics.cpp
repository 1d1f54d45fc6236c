#include "pes/metrics.hpp"

#include <cmath>
#include <functional>

namespace pes {

double primal_gap(const SaddleProblem& prob, const Vector& x) {
  return prob.primal_value(x) - prob.primal_optimum();
}

double gap_k(const SaddleProblem& prob, const PrimalDualPoint& z,
             const Vector& x0, double gamma) {
  if (gamma < 0.0) throw std::invalid_argument("gap_k: gamma < 0");
  auto anchored = [&](const PrimalDualPoint& p) {
    return prob.value(p) + 0.5 * gamma * (p.x - x0).squaredNorm();
  };
  PrimalDualPoint up{z.x, prob.best_response_y(z.x)};
  PrimalDualPoint down{prob.best_response_x_regularized(z.y, x0, gamma), z.y};
  return anchored(up) - anchored(down);
}

double lyapunov_delta(Regime regime, const ProblemConstants& constants,
                      double primal_gap_val, double gap_k_val) {
  switch (regime) {
    case Regime::kTheorem1: {
      const double l_hat = constants.L_primal + 2.0 * constants.rho;
      const double c = 4.0 * constants.rho + (248.0 / 53.0) * l_hat;
      return primal_gap_val + (8.0 * l_hat / (53.0 * c)) * gap_k_val;
    }
    case Regime::kTheorem2:
      return 475.0 * primal_gap_val + 57.0 * gap_k_val;
    case Regime::kManual:
      return primal_gap_val + gap_k_val;
  }
  throw std::logic_error("lyapunov_delta: unreachable");
}

namespace {

// Backtracking gradient descent on a smooth (strongly) convex function.
// Returns the minimizer; throws if the gradient norm fails to reach tol.
// Once rounding stops the function value from strictly decreasing, the
// iterate is within machine precision of the minimizer and the value-level
// error is quadratically small, so stagnation counts as convergence.
Vector minimize_backtracking(const std::function<double(const Vector&)>& fn,
                             const std::function<Vector(const Vector&)>& grad,
                             Vector x, double tol, long max_iters) {
  double step = 1.0;
  double fx = fn(x);
  int stalled = 0;
  for (long it = 0; it < max_iters; ++it) {
    Vector g = grad(x);
    const double gnorm2 = g.squaredNorm();
    if (std::sqrt(gnorm2) <= tol) return x;
    const double f_before = fx;
    for (;;) {
      Vector trial = x - step * g;
      const double ft = fn(trial);
      if (ft <= fx - 0.5 * step * gnorm2) {
        x = std::move(trial);
        fx = ft;
        step *= 2.0;
        break;
      }
      step *= 0.5;
      if (step < 1e-300) return x;  // rounding floor
    }
    stalled = fx < f_before ? 0 : stalled + 1;
    if (stalled > 50) return x;  // rounding floor
  }
  throw std::runtime_error("numeric inner solve: descent did not converge");
}

// Projected backtracking ascent for the concave inner maximization.
Vector maximize_projected(const std::function<double(const Vector&)>& fn,
                          const std::function<Vector(const Vector&)>& grad,
                          const FeasibleSet& set, Vector y, double tol,
                          long max_iters) {
  double step = 1.0;
  y = set.project(y);
  double fy = fn(y);
  int stalled = 0;
  for (long it = 0; it < max_iters; ++it) {
    Vector g = grad(y);
    // Gradient-mapping residual at unit step measures stationarity on Y.
    const double residual = (y - set.project(y + g)).norm();
    if (residual <= tol) return y;
    const double f_before = fy;
    for (;;) {
      Vector trial = set.project(y + step * g);
      const double ft = fn(trial);
      const double decrease = (trial - y).squaredNorm() / (2.0 * step);
      if (ft >= fy + 0.5 * decrease || (trial - y).norm() < 1e-300) {
        y = std::move(trial);
        fy = ft;
        step *= 2.0;
        break;
      }
      step *= 0.5;
      if (step < 1e-300) return y;  // rounding floor
    }
    stalled = fy > f_before ? 0 : stalled + 1;
    if (stalled > 50) return y;  // rounding floor
  }
  throw std::runtime_error("numeric inner solve: ascent did not converge");
}

}  // namespace

double numeric_inner_solve_gap(const SaddleProblem& prob,
                               const PrimalDualPoint& z, const Vector& x0,
                               double gamma, double tol, long max_iters) {
  auto anchored = [&](const Vector& x, const Vector& y) {
    PrimalDualPoint p{x, y};
    return prob.value(p) + 0.5 * gamma * (x - x0).squaredNorm();
  };

  // Inner maximization over y at fixed z.x (the anchor term is constant).
  Vector y_hat = maximize_projected(
      [&](const Vector& y) { return anchored(z.x, y); },
      [&](const Vector& y) {
        PrimalDualPoint p{z.x, y};
        return prob.exact_gradient(p).gy;
      },
      prob.domain_y(), z.y, tol, max_iters);

  // Inner minimization over x at fixed z.y.
  Vector x_hat = minimize_backtracking(
      [&](const Vector& x) { return anchored(x, z.y); },
      [&](const Vector& x) {
        PrimalDualPoint p{x, z.y};
        Vector g = prob.exact_gradient(p).gx;
        g += gamma * (x - x0);
        return g;
      },
      z.x, tol, max_iters);

  return anchored(z.x, y_hat) - anchored(x_hat, z.y);
}

double estimate_pl_constant(const SaddleProblem& prob, int sample_count,
                            double radius, std::mt19937_64& rng) {
  if (sample_count < 1 || !(radius > 0.0)) {
    throw std::invalid_argument("estimate_pl_constant: bad parameters");
  }
  Vector center = prob.has_saddle_point() ? prob.saddle_point().x
                                          : Vector::Zero(prob.dim_x());
  const double p_star = prob.primal_optimum();
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  double best = std::numeric_limits<double>::infinity();
  int used = 0;
  for (int s = 0; s < sample_count; ++s) {
    // Uniform draw in the ball: Gaussian direction, radial CDF inverse.
    Vector dir(prob.dim_x());
    for (Eigen::Index i = 0; i < dir.size(); ++i) dir(i) = gauss(rng);
    const double norm = dir.norm();
    if (norm < 1e-300) continue;
    const double r =
        radius * std::pow(unif(rng), 1.0 / static_cast<double>(dir.size()));
    Vector x = center + dir * (r / norm);

    const double gap = prob.primal_value(x) - p_star;
    if (gap < 1e-12) continue;
    // Envelope theorem: grad P(x) = grad_x f(x, yhat(x)).
    PrimalDualPoint z{x, prob.best_response_y(x)};
    const double g2 = prob.exact_gradient(z).gx.squaredNorm();
    best = std::min(best, g2 / (2.0 * gap));
    ++used;
  }
  if (used == 0) {
    throw std::runtime_error(
        "estimate_pl_constant: all samples at the optimum, nothing to rate");
  }
  return best;
}

}  // namespace pes
