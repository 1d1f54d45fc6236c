#include "pes/solvers.hpp"

#include <chrono>
#include <cmath>
#include <iostream>

namespace pes {

namespace {

std::int64_t ceil_to_int(double v) {
  if (!(v > 0.0)) return 1;
  return static_cast<std::int64_t>(std::ceil(v - 1e-12));
}

}  // namespace

double Schedule::eta(int k) const {
  return eta0 * std::pow(decay, k - 1);
}

double Schedule::length_real(int k) const {
  return static_cast<double>(T0) * std::pow(growth, k - 1);
}

std::int64_t Schedule::length(int k) const {
  return ceil_to_int(length_real(k));
}

void AdaGradState::accumulate(const Vector& g) {
  if (g.size() != s.size()) {
    throw std::invalid_argument("AdaGradState: dimension mismatch");
  }
  grad_sum += g;
  s = (s.array().square() + g.array().square()).sqrt();
  ++t;
}

// ---------------------------------------------------------------------------
// Epoch subroutines

PrimalDualPoint ogda_epoch(const SaddleProblem& prob,
                           const PrimalDualPoint& z0, double eta,
                           std::int64_t T, std::mt19937_64& rng,
                           int batch_size) {
  if (T < 1) throw std::invalid_argument("ogda_epoch: T < 1");
  if (!(eta > 0.0)) throw std::invalid_argument("ogda_epoch: eta <= 0");
  const FeasibleSet& set_y = prob.domain_y();

  PrimalDualPoint ztilde = z0;
  // The extrapolation gradient of step t is reused as step t+1's leading
  // gradient: same point, same sample. T+1 oracle calls total.
  Vector g_lead = as_operator(prob.stochastic_gradient(z0, rng, batch_size));
  Vector sum_x = Vector::Zero(z0.x.size());
  Vector sum_y = Vector::Zero(z0.y.size());
  for (std::int64_t t = 1; t <= T; ++t) {
    PrimalDualPoint zt = prox_step(ztilde, eta * g_lead, set_y);
    Vector g_new = as_operator(prob.stochastic_gradient(zt, rng, batch_size));
    ztilde = prox_step(ztilde, eta * g_new, set_y);
    g_lead = std::move(g_new);
    sum_x += zt.x;
    sum_y += zt.y;
  }
  const double inv = 1.0 / static_cast<double>(T);
  return {sum_x * inv, sum_y * inv};
}

PrimalDualPoint sgda_epoch(const SaddleProblem& prob,
                           const PrimalDualPoint& z0, double eta,
                           std::int64_t T, double gamma,
                           std::mt19937_64& rng, int batch_size) {
  if (T < 1) throw std::invalid_argument("sgda_epoch: T < 1");
  if (!(eta > 0.0)) throw std::invalid_argument("sgda_epoch: eta <= 0");
  if (gamma < 0.0) throw std::invalid_argument("sgda_epoch: gamma < 0");
  const FeasibleSet& set_y = prob.domain_y();
  const Vector anchor = z0.x;

  PrimalDualPoint z = z0;
  Vector sum_x = Vector::Zero(z0.x.size());
  Vector sum_y = Vector::Zero(z0.y.size());
  for (std::int64_t t = 1; t <= T; ++t) {
    Vector g = as_operator(prob.stochastic_gradient(z, rng, batch_size));
    z = prox_step_regularized(z, eta * g, anchor, gamma * eta, set_y);
    sum_x += z.x;
    sum_y += z.y;
  }
  const double inv = 1.0 / static_cast<double>(T);
  return {sum_x * inv, sum_y * inv};
}

namespace {

// Projection of v onto a ball under the diagonal metric w: minimize
// sum_i w_i (y_i - v_i)^2 subject to ||y - c|| <= r. The KKT multiplier
// equation is scalar and monotone, solved by bisection.
Vector project_weighted_ball(const Vector& v, const Vector& w,
                             const Vector& c, double r) {
  Vector d = v - c;
  if (d.norm() <= r) return v;
  auto radius_at = [&](double lam) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < d.size(); ++i) {
      const double yi = w(i) * d(i) / (w(i) + lam);
      s += yi * yi;
    }
    return std::sqrt(s);
  };
  double lo = 0.0, hi = 1.0;
  while (radius_at(hi) > r) {
    hi *= 2.0;
    if (hi > 1e300) break;
  }
  for (int it = 0; it < 200 && (hi - lo) > 1e-12 * (1.0 + hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (radius_at(mid) > r ? lo : hi) = mid;
  }
  const double lam = 0.5 * (lo + hi);
  Vector y(d.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    y(i) = c(i) + w(i) * d(i) / (w(i) + lam);
  }
  return y;
}

Vector project_weighted(const Vector& v, const Vector& w,
                        const FeasibleSet& set) {
  switch (set.kind()) {
    case FeasibleSet::Kind::kAllSpace:
      return v;
    case FeasibleSet::Kind::kBall:
      return project_weighted_ball(v, w, set.center(), set.radius());
    case FeasibleSet::Kind::kBox:
      // Diagonal metric keeps the box projection separable.
      return v.cwiseMax(set.lower()).cwiseMin(set.upper());
  }
  throw std::logic_error("project_weighted: unreachable");
}

}  // namespace

AdagradEpochResult adagrad_epoch(const SaddleProblem& prob,
                                 const PrimalDualPoint& z0, double eta,
                                 double M, const AdaGradParams& params,
                                 std::mt19937_64& rng, int batch_size) {
  if (!(eta > 0.0)) throw std::invalid_argument("adagrad_epoch: eta <= 0");
  if (!(params.delta > 0.0)) {
    throw std::invalid_argument("adagrad_epoch: delta <= 0");
  }
  if (!(M > 0.0)) throw std::invalid_argument("adagrad_epoch: M <= 0");
  const Eigen::Index d = prob.dim_x();
  const Eigen::Index dp = prob.dim_y();
  const double m =
      params.m > 0.0 ? params.m : 1.0 / std::sqrt(static_cast<double>(d + dp));
  const std::int64_t cap =
      params.cap_T > 0 ? params.cap_T : ceil_to_int(100.0 * M);

  AdaGradState state(d + dp);
  PrimalDualPoint z = z0;
  Vector sum_x = Vector::Zero(d);
  Vector sum_y = Vector::Zero(dp);
  AdagradEpochResult result;
  for (;;) {
    Vector g = as_operator(prob.stochastic_gradient(z, rng, batch_size));
    sum_x += z.x;
    sum_y += z.y;
    state.accumulate(g);
    const double threshold =
        M * std::max((params.delta + state.s.maxCoeff()) / m,
                     m * state.s.sum());
    if (static_cast<double>(state.t) >= threshold) break;
    if (state.t >= cap) {
      result.capped = true;
      break;
    }
    // Dual averaging against the accumulated metric delta + s.
    Vector weight = params.delta + state.s.array();
    Vector step = eta * (state.grad_sum.array() / weight.array());
    z.x = z0.x - step.head(d);
    z.y = project_weighted(Vector(z0.y - step.tail(dp)),
                           Vector(weight.tail(dp)), prob.domain_y());
  }
  const double inv = 1.0 / static_cast<double>(state.t);
  result.average = {sum_x * inv, sum_y * inv};
  result.steps = state.t;
  return result;
}

// ---------------------------------------------------------------------------
// Schedules

double default_eta0(UpdateVariant variant, const ProblemConstants& c) {
  if (variant == UpdateVariant::kSgda) {
    return c.rho > 0.0 ? 1.0 / c.rho : 1.0 / c.ell;
  }
  return 1.0 / (2.0 * std::sqrt(2.0) * c.ell);
}

namespace {

double clamp_eta0(double eta0, double cap, const char* which) {
  if (!(eta0 > 0.0)) throw std::invalid_argument("schedule: eta0 <= 0");
  if (eta0 > cap) {
    std::cerr << "warning: eta0 " << eta0 << " exceeds the " << which
              << " cap " << cap << ", clamping\n";
    return cap;
  }
  return eta0;
}

// Smallest K (approximately) satisfying K >= scale * log(coef * K),
// by fixed-point iteration from K = 1. Returns 0 when no constraint.
double fixed_point_k(double scale, double coef) {
  if (!(coef > 0.0)) return 0.0;
  double k = 1.0;
  for (int it = 0; it < 100; ++it) {
    const double arg = coef * k;
    const double next = arg > 1.0 ? scale * std::log(arg) : 0.0;
    if (std::abs(next - k) <= 1e-10 * std::max(1.0, k)) return next;
    k = next;
    if (k <= 0.0) return 0.0;
  }
  return k;
}

int epochs_from(double k1, double k2) {
  const double k = std::max(k1, k2);
  if (k > 1e7) throw std::invalid_argument("schedule: epoch count overflow");
  return std::max(1, static_cast<int>(std::ceil(k - 1e-9)));
}

}  // namespace

Schedule schedule_from_theorem1(const ProblemConstants& c, double eta0,
                                double eps) {
  if (!(c.mu_pl > 0.0) || !(c.rho > 0.0)) {
    throw std::invalid_argument(
        "schedule_from_theorem1: requires rho > 0 and a known PL constant");
  }
  if (!(c.eps0 > 0.0)) {
    throw std::invalid_argument(
        "schedule_from_theorem1: initial gap bound eps0 required");
  }
  if (!(eps > 0.0)) throw std::invalid_argument("schedule: eps <= 0");
  eta0 = clamp_eta0(eta0, 1.0 / (2.0 * std::sqrt(2.0) * c.ell), "step-size");

  const double l_hat = c.L_primal + 2.0 * c.rho;
  const double cc = 4.0 * c.rho + (248.0 / 53.0) * l_hat;
  const double scale = (cc + 2.0 * c.mu_pl) / (2.0 * c.mu_pl);

  Schedule s;
  s.gamma = 2.0 * c.rho;
  s.eta0 = eta0;
  s.decay = std::exp(-1.0 / scale);
  s.growth = 1.0 / s.decay;
  s.T0 = ceil_to_int(212.0 / (eta0 * std::min(c.rho, c.mu_y)));
  const double k1 = scale * std::log(4.0 * c.eps0 / eps);
  const double k2 =
      c.sigma > 0.0
          ? fixed_point_k(scale, 208.0 * eta0 * l_hat * c.sigma * c.sigma /
                                     ((cc + 2.0 * c.mu_pl) * eps))
          : 0.0;
  s.K = epochs_from(k1, k2);
  s.regime = Regime::kTheorem1;
  return s;
}

Schedule schedule_from_theorem2(const ProblemConstants& c, double eta0,
                                double eps) {
  if (!(c.mu_pl > 0.0) || !(c.rho > 0.0) || c.rho > c.mu_pl / 8.0) {
    throw std::invalid_argument(
        "schedule_from_theorem2: requires 0 < rho <= mu_pl/8");
  }
  if (!(c.eps0 > 0.0)) {
    throw std::invalid_argument(
        "schedule_from_theorem2: initial gap bound eps0 required");
  }
  if (!(eps > 0.0)) throw std::invalid_argument("schedule: eps <= 0");
  eta0 = clamp_eta0(eta0, 1.0 / (2.0 * std::sqrt(2.0) * c.ell), "step-size");

  Schedule s;
  s.gamma = c.mu_pl / 4.0;
  s.eta0 = eta0;
  s.decay = std::exp(-1.0 / 16.0);
  s.growth = std::exp(1.0 / 16.0);
  s.T0 = ceil_to_int(384.0 / (eta0 * std::min(c.mu_pl / 8.0, c.mu_y)));
  const double k1 = 16.0 * std::log(1200.0 * c.eps0 / eps);
  const double k2 =
      c.sigma > 0.0
          ? fixed_point_k(16.0, 15600.0 * eta0 * c.sigma * c.sigma / eps)
          : 0.0;
  s.K = epochs_from(k1, k2);
  s.regime = Regime::kTheorem2;
  return s;
}

Schedule schedule_adagrad(const ProblemConstants& c, double eta0, double eps,
                          Eigen::Index dim_total, double m) {
  if (!(c.mu_pl > 0.0) || !(c.rho > 0.0)) {
    throw std::invalid_argument(
        "schedule_adagrad: requires rho > 0 and a known PL constant");
  }
  if (!(c.eps0 > 0.0)) {
    throw std::invalid_argument(
        "schedule_adagrad: initial gap bound eps0 required");
  }
  if (!(eps > 0.0)) throw std::invalid_argument("schedule: eps <= 0");
  if (dim_total < 1) {
    throw std::invalid_argument("schedule_adagrad: dim_total < 1");
  }
  eta0 = clamp_eta0(eta0, 1.0 / (2.0 * std::sqrt(2.0) * c.ell), "step-size");
  if (m <= 0.0) m = 1.0 / std::sqrt(static_cast<double>(dim_total));

  const double l_hat = c.L_primal + 2.0 * c.rho;
  const double cc = 4.0 * c.rho + (248.0 / 53.0) * l_hat;
  const double scale = (cc + 2.0 * c.mu_pl) / (2.0 * c.mu_pl);

  Schedule s;
  s.gamma = 2.0 * c.rho;
  s.eta0 = eta0;
  // The adaptive analysis halves the per-epoch exponent on both the step
  // size and the stopping-rule budget M_k.
  s.decay = std::exp(-0.5 / scale);
  s.growth = 1.0 / s.decay;
  s.T0 = ceil_to_int(212.0 * m / (eta0 * std::min(c.rho, c.mu_y)));
  const double k1 = scale * std::log(4.0 * c.eps0 / eps);
  const double k2 =
      c.sigma > 0.0
          ? fixed_point_k(scale, 208.0 * eta0 * l_hat * c.sigma * c.sigma /
                                     ((cc + 2.0 * c.mu_pl) * eps))
          : 0.0;
  s.K = epochs_from(k1, k2);
  s.regime = Regime::kTheorem1;
  return s;
}

// ---------------------------------------------------------------------------
// Outer loop

namespace {

void fill_gap_metrics(const SaddleProblem& prob, const PrimalDualPoint& z,
                      double gamma, Regime regime, EpochTrace& row) {
  if (prob.has_primal_value()) {
    try {
      row.objective_gap = primal_gap(prob, z.x);
    } catch (const std::exception&) {
    }
  }
  if (prob.has_best_response_y() && prob.has_best_response_x_regularized()) {
    try {
      row.gap_k = gap_k(prob, z, z.x, gamma);
    } catch (const std::exception&) {
    }
  }
  if (regime != Regime::kManual && std::isfinite(row.objective_gap) &&
      std::isfinite(row.gap_k)) {
    row.delta_k = lyapunov_delta(regime, prob.constants(), row.objective_gap,
                                 row.gap_k);
  }
}

}  // namespace

std::vector<EpochTrace> pes_solve(const SaddleProblem& prob,
                                  const PesConfig& config) {
  if (config.variant == UpdateVariant::kAdagrad && !config.has_adagrad) {
    throw std::invalid_argument(
        "pes_solve: adaptive variant requires its parameter block");
  }
  if (config.variant != UpdateVariant::kAdagrad && config.has_adagrad) {
    throw std::invalid_argument(
        "pes_solve: adagrad block set for a non-adaptive variant");
  }
  if (config.batch_size < 1) {
    throw std::invalid_argument("pes_solve: batch_size < 1");
  }
  if (!(config.slack_T > 0.0)) {
    throw std::invalid_argument("pes_solve: slack_T <= 0");
  }
  const Schedule& sched = config.schedule;
  if (sched.K < 1) throw std::invalid_argument("pes_solve: K < 1");

  PrimalDualPoint z = config.init;
  if (z.x.size() == 0) z.x = Vector::Ones(prob.dim_x());
  if (z.y.size() == 0) z.y = Vector::Zero(prob.dim_y());
  if (z.x.size() != prob.dim_x() || z.y.size() != prob.dim_y()) {
    throw std::invalid_argument("pes_solve: init dimension mismatch");
  }
  z.y = prob.domain_y().project(z.y);

  std::mt19937_64 rng(config.seed);
  std::int64_t calls = 0;
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         t0)
        .count();
  };

  std::vector<EpochTrace> trace;
  trace.reserve(sched.K);
  for (int k = 1; k <= sched.K; ++k) {
    EpochTrace row;
    row.epoch = k;
    row.eta = sched.eta(k);

    std::int64_t remaining = config.budget > 0
                                 ? config.budget - calls
                                 : std::numeric_limits<std::int64_t>::max();
    const std::int64_t planned = std::max<std::int64_t>(
        1, ceil_to_int(static_cast<double>(sched.length(k)) * config.slack_T));

    bool truncated = false;
    switch (config.variant) {
      case UpdateVariant::kOgda: {
        if (remaining < 2) {
          row.T = 0;
          row.early_stop = true;
          break;
        }
        std::int64_t T = planned;
        if (T + 1 > remaining) {
          T = remaining - 1;
          truncated = true;
        }
        RegularizedProblem fk(prob, z.x, sched.gamma);
        z = ogda_epoch(fk, z, row.eta, T, rng, config.batch_size);
        calls += T + 1;
        row.T = T;
        break;
      }
      case UpdateVariant::kSgda: {
        if (remaining < 1) {
          row.T = 0;
          row.early_stop = true;
          break;
        }
        std::int64_t T = planned;
        if (T > remaining) {
          T = remaining;
          truncated = true;
        }
        z = sgda_epoch(prob, z, row.eta, T, sched.gamma, rng,
                       config.batch_size);
        calls += T;
        row.T = T;
        break;
      }
      case UpdateVariant::kAdagrad: {
        if (remaining < 1) {
          row.T = 0;
          row.early_stop = true;
          break;
        }
        AdaGradParams params = config.adagrad;
        const double M = sched.length_real(k) * config.slack_T;
        std::int64_t cap =
            params.cap_T > 0 ? params.cap_T : ceil_to_int(100.0 * M);
        if (cap > remaining) {
          cap = remaining;
          truncated = true;
        }
        params.cap_T = cap;
        RegularizedProblem fk(prob, z.x, sched.gamma);
        AdagradEpochResult res =
            adagrad_epoch(fk, z, row.eta, M, params, rng, config.batch_size);
        z = res.average;
        calls += res.steps;
        row.T = res.steps;
        row.capped = res.capped;
        break;
      }
    }
    row.early_stop = row.early_stop || truncated;
    row.oracle_calls = calls;
    row.point = z;
    fill_gap_metrics(prob, z, sched.gamma, sched.regime, row);
    row.elapsed_s = elapsed();
    trace.push_back(std::move(row));
    if (trace.back().T == 0) break;  // budget exhausted before the epoch
  }
  return trace;
}

// ---------------------------------------------------------------------------
// Baseline

StocAgdaResult stoc_agda(const SaddleProblem& prob,
                         const StocAgdaConfig& config) {
  if (!(config.tau1 > 0.0) || !(config.tau2 > 0.0) ||
      !(config.lambda > 0.0)) {
    throw std::invalid_argument("stoc_agda: step parameters must be > 0");
  }
  if (config.T < 1) throw std::invalid_argument("stoc_agda: T < 1");
  if (config.batch_size < 1) {
    throw std::invalid_argument("stoc_agda: batch_size < 1");
  }

  PrimalDualPoint z = config.init;
  if (z.x.size() == 0) z.x = Vector::Ones(prob.dim_x());
  if (z.y.size() == 0) z.y = Vector::Zero(prob.dim_y());
  z.y = prob.domain_y().project(z.y);

  std::mt19937_64 rng(config.seed);
  const std::int64_t stride = std::max<std::int64_t>(1, config.stride);

  StocAgdaResult result;
  auto record = [&](std::int64_t t) {
    StocAgdaSample sample;
    sample.t = t;
    sample.oracle_calls = result.oracle_calls;
    if (prob.has_primal_value()) {
      try {
        sample.objective_gap = primal_gap(prob, z.x);
      } catch (const std::exception&) {
      }
    }
    result.samples.push_back(sample);
  };

  for (std::int64_t t = 0; t < config.T; ++t) {
    const double denom = config.lambda + static_cast<double>(t);
    GradientPair g1 = prob.stochastic_gradient(z, rng, config.batch_size);
    Vector x_new = z.x - (config.tau2 / denom) * g1.gx;
    PrimalDualPoint half{x_new, z.y};
    GradientPair g2 = prob.stochastic_gradient(half, rng, config.batch_size);
    z.x = std::move(x_new);
    z.y = prob.domain_y().project(z.y + (config.tau1 / denom) * g2.gy);
    result.oracle_calls += 2;
    if ((t + 1) % stride == 0) record(t + 1);
  }
  if (result.samples.empty() || result.samples.back().t != config.T) {
    record(config.T);
  }
  result.final_point = z;
  return result;
}

}  // namespace pes
