#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "pes/solvers.hpp"

using namespace pes;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

QuadraticGame scalar_game() {
  Eigen::MatrixXd a(1, 1);
  a(0, 0) = 1.0;
  return QuadraticGame(a, -0.5, 1.0, 0.0);
}

QuadraticGame bilinear_game() {
  // f(x,y) = x*y with a tiny curvature-free setup is not representable
  // (mu_y must be positive); use mu_y -> 0 is not allowed, so tests that
  // need pure x*y use this epsilon-curvature stand-in where the first
  // update step is unaffected (y0 = 0 kills the -mu_y*y term).
  Eigen::MatrixXd a(1, 1);
  a(0, 0) = 1.0;
  return QuadraticGame(a, 0.0, 1.0, 0.0);
}

ProblemConstants scalar_constants_with_eps0() {
  QuadraticGame prob = scalar_game();
  ProblemConstants c = prob.constants();
  c.eps0 = 1.0;
  return c;
}

}  // namespace

TEST_CASE("optimistic epoch: first step of the hand recursion") {
  // On f(x,y) = x*y - mu_y/2 y^2 from z0 = (1, 0) the dual curvature term
  // vanishes at y = 0, so the first iterate matches the bilinear hand
  // computation: z_1 = (1, 0.1) with step 0.1.
  QuadraticGame prob = bilinear_game();
  std::mt19937_64 rng(0);
  PrimalDualPoint z1 = ogda_epoch(prob, {vec({1}), vec({0})}, 0.1, 1, rng);
  CHECK(z1.x(0) == doctest::Approx(1.0));
  CHECK(z1.y(0) == doctest::Approx(0.1));
}

TEST_CASE("optimistic epoch: two-step hand recursion") {
  QuadraticGame prob = bilinear_game();
  // Hand recursion with mu_y = 1 from (1, 0), eta = 0.1. Operator is
  // (y, -(x - y)). Leading gradient at z0: (0, -1).
  // z1 = (1, 0.1); g(z1) = (0.1, -0.9); ztilde1 = (0.99, 0.09).
  // z2 = ztilde1 - 0.1*g(z1) = (0.98, 0.18).
  std::mt19937_64 rng(0);
  PrimalDualPoint avg = ogda_epoch(prob, {vec({1}), vec({0})}, 0.1, 2, rng);
  CHECK(avg.x(0) == doctest::Approx((1.0 + 0.98) / 2));
  CHECK(avg.y(0) == doctest::Approx((0.1 + 0.18) / 2));
}

TEST_CASE("one-epoch gap bound for the averaged optimistic iterate") {
  // Strongly-convex-strongly-concave instances, no noise: the average
  // after T steps satisfies gap <= (||xhat - x0||^2 + ||yhat - y0||^2)/(eta T).
  std::mt19937_64 seed_rng(99);
  std::normal_distribution<double> gauss;
  for (int inst = 0; inst < 10; ++inst) {
    QuadraticGame prob =
        make_quadratic_game(3, 3, 0.4, 1.0, 0.3, 0.8, 0.0, 500 + inst);
    const double eta = 1.0 / (4.0 * std::sqrt(3.0) * prob.constants().ell);
    PrimalDualPoint z0{
        Vector::NullaryExpr(3, [&](Eigen::Index) { return gauss(seed_rng); }),
        Vector::NullaryExpr(3, [&](Eigen::Index) { return gauss(seed_rng); })};
    std::mt19937_64 rng(inst);
    const std::int64_t T = 200;
    PrimalDualPoint avg = ogda_epoch(prob, z0, eta, T, rng);
    const double gap = gap_k(prob, avg, Vector::Zero(3), 0.0);
    Vector x_hat = prob.best_response_x_regularized(avg.y, Vector::Zero(3), 0.0);
    Vector y_hat = prob.best_response_y(avg.x);
    const double bound = ((x_hat - z0.x).squaredNorm() +
                          (y_hat - z0.y).squaredNorm()) /
                         (eta * static_cast<double>(T));
    CHECK(gap >= -1e-9);
    CHECK(gap <= bound * (1 + 1e-6));
  }
}

TEST_CASE("descent-ascent epoch basics") {
  QuadraticGame prob = bilinear_game();
  std::mt19937_64 rng(0);
  PrimalDualPoint z1 =
      sgda_epoch(prob, {vec({1}), vec({0})}, 0.1, 1, 0.0, rng);
  CHECK(z1.x(0) == doctest::Approx(1.0));
  CHECK(z1.y(0) == doctest::Approx(0.1));

  SUBCASE("origin is a fixed point when gradients vanish") {
    QuadraticGame q = make_quadratic_game(2, 2, 0.5, 1.0, -0.2, 0.5, 0.0, 4);
    std::mt19937_64 rng2(1);
    PrimalDualPoint z = sgda_epoch(q, {Vector::Zero(2), Vector::Zero(2)}, 0.1,
                                   50, 0.4, rng2);
    CHECK(z.x.norm() == 0.0);
    CHECK(z.y.norm() == 0.0);
  }

  SUBCASE("anchored gap decays like 1/T") {
    QuadraticGame q = scalar_game();
    const double gamma = 2 * q.constants().rho;
    PrimalDualPoint z0{vec({1}), vec({0})};
    auto gap_at = [&](std::int64_t T) {
      std::mt19937_64 r(7);
      PrimalDualPoint avg = sgda_epoch(q, z0, 0.05, T, gamma, r);
      return gap_k(q, avg, z0.x, gamma);
    };
    const double g100 = gap_at(100);
    const double g200 = gap_at(200);
    const double g400 = gap_at(400);
    // Doubling T at least halves the gap (the averaged iterate obeys a
    // C/T bound; noiseless runs may beat it).
    CHECK(g200 <= g100 / 2 * 1.25);
    CHECK(g400 <= g200 / 2 * 1.25);
    CHECK(g400 >= 0.0);
  }
}

TEST_CASE("adaptive accumulator") {
  AdaGradState state(2);
  state.accumulate(vec({3, 3}));
  state.accumulate(vec({4, -4}));
  CHECK(state.s(0) == doctest::Approx(5.0));
  CHECK(state.s(1) == doctest::Approx(5.0));
  CHECK(state.t == 2);

  SUBCASE("coordinatewise monotone under random input") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> gauss;
    AdaGradState st(4);
    Vector prev = st.s;
    for (int i = 0; i < 10000; ++i) {
      st.accumulate(
          Vector::NullaryExpr(4, [&](Eigen::Index) { return gauss(rng); }));
      CHECK((st.s.array() >= prev.array() - 1e-15).all());
      prev = st.s;
    }
  }
}

TEST_CASE("adaptive epoch behaviors") {
  SUBCASE("frozen at a stationary start, stops at the degenerate rule") {
    QuadraticGame q = make_quadratic_game(2, 2, 0.5, 1.0, 0.1, 0.5, 0.0, 4);
    AdaGradParams params;
    params.delta = 0.3;
    params.m = 0.5;
    std::mt19937_64 rng(0);
    const double M = 10.0;
    AdagradEpochResult res = adagrad_epoch(
        q, {Vector::Zero(2), Vector::Zero(2)}, 0.1, M, params, rng);
    CHECK(res.steps ==
          static_cast<std::int64_t>(std::ceil(M * params.delta / params.m)));
    CHECK(!res.capped);
    CHECK(res.average.x.norm() == 0.0);
  }

  SUBCASE("large delta approaches plain dual averaging") {
    QuadraticGame q = make_quadratic_game(3, 2, 0.5, 1.0, 0.2, 0.8, 0.0, 9);
    const double delta = 1e8;
    AdaGradParams params;
    params.delta = delta;
    params.m = 1.0;
    params.cap_T = 20;
    std::mt19937_64 rng(0);
    PrimalDualPoint z0{vec({1, -0.5, 0.3}), vec({0.2, 0.1})};
    AdagradEpochResult res = adagrad_epoch(q, z0, 0.5, 1e-6, params, rng);
    // Replay plain dual averaging with the same gradients (noiseless).
    PrimalDualPoint z = z0;
    Vector sum_x = Vector::Zero(3), sum_y = Vector::Zero(2);
    Vector grad_sum = Vector::Zero(5);
    double max_s = 0.0;
    Vector s2 = Vector::Zero(5);
    for (std::int64_t t = 0; t < res.steps; ++t) {
      Vector g = as_operator(q.exact_gradient(z));
      sum_x += z.x;
      sum_y += z.y;
      grad_sum += g;
      s2 = (s2.array() + g.array().square()).matrix();
      max_s = std::max(max_s, std::sqrt(s2.maxCoeff()));
      z.x = z0.x - 0.5 * grad_sum.head(3) / delta;
      z.y = z0.y - 0.5 * grad_sum.tail(2) / delta;
    }
    sum_x /= static_cast<double>(res.steps);
    sum_y /= static_cast<double>(res.steps);
    const double tol = 2.0 * max_s / delta;
    CHECK((res.average.x - sum_x).norm() <=
          tol * std::max(1.0, sum_x.norm()) + 1e-12);
    CHECK((res.average.y - sum_y).norm() <=
          tol * std::max(1.0, sum_y.norm()) + 1e-12);
  }

  SUBCASE("stopping rule fires without the cap on a noiseless instance") {
    QuadraticGame q = make_quadratic_game(3, 3, 0.5, 1.0, -0.2, 0.6, 0.0, 12);
    RegularizedProblem fk(q, Vector::Ones(3), 0.4);
    AdaGradParams params;
    params.delta = 1e-3;
    std::mt19937_64 rng(5);
    AdagradEpochResult res = adagrad_epoch(
        fk, {Vector::Ones(3), Vector::Zero(3)}, 0.1, 50.0, params, rng);
    CHECK(!res.capped);
    CHECK(res.steps >= 1);
  }
}

TEST_CASE("schedule construction and algebra") {
  ProblemConstants c = scalar_constants_with_eps0();
  c.sigma = 1.0;
  const double eta0 = 1.0 / (2 * std::sqrt(2.0) * c.ell);
  Schedule s = schedule_from_theorem1(c, eta0, 1e-3);
  CHECK(s.gamma == doctest::Approx(2 * c.rho));
  CHECK(s.decay * s.growth == doctest::Approx(1.0));
  CHECK(s.regime == Regime::kTheorem1);
  for (int k = 1; k <= 30; ++k) {
    const double product = s.eta(k) * static_cast<double>(s.length(k));
    const double base = s.eta0 * static_cast<double>(s.T0);
    CHECK(std::abs(product - base) / base <=
          1.0 / static_cast<double>(s.T0) + 1e-12);
  }

  SUBCASE("halving the target adds the expected epochs") {
    const double l_hat = c.L_primal + 2 * c.rho;
    const double cc = 4 * c.rho + (248.0 / 53.0) * l_hat;
    const double scale = (cc + 2 * c.mu_pl) / (2 * c.mu_pl);
    Schedule s1 = schedule_from_theorem1(c, eta0, 1e-3);
    Schedule s2 = schedule_from_theorem1(c, eta0, 5e-4);
    CHECK(std::abs((s2.K - s1.K) - scale * std::log(2.0)) <= 2.0);
  }

  SUBCASE("oversized step is clamped") {
    Schedule clamped = schedule_from_theorem1(c, 10.0, 1e-3);
    CHECK(clamped.eta0 == doctest::Approx(1.0 / (2 * std::sqrt(2.0) * c.ell)));
  }

  SUBCASE("missing PL or curvature information is rejected") {
    ProblemConstants bad = c;
    bad.mu_pl = 0;
    CHECK_THROWS_AS(schedule_from_theorem1(bad, eta0, 1e-3),
                    std::invalid_argument);
    bad = c;
    bad.rho = 0;
    CHECK_THROWS_AS(schedule_from_theorem1(bad, eta0, 1e-3),
                    std::invalid_argument);
  }
}

TEST_CASE("small-curvature regime schedule") {
  ProblemConstants c = scalar_constants_with_eps0();
  c.mu_pl = 0.4;
  c.rho = 0.05;  // exactly mu/8
  const double eta0 = 0.05;
  Schedule s = schedule_from_theorem2(c, eta0, 1e-3);
  CHECK(s.decay == std::exp(-1.0 / 16.0));
  CHECK(s.growth == std::exp(1.0 / 16.0));
  CHECK(s.gamma == doctest::Approx(0.1));
  CHECK(s.regime == Regime::kTheorem2);
  CHECK(s.T0 ==
        static_cast<std::int64_t>(
            std::ceil(384.0 / (eta0 * std::min(c.mu_pl / 8, c.mu_y)))));

  ProblemConstants over = c;
  over.rho = 0.05 + 1e-9;
  CHECK_THROWS_AS(schedule_from_theorem2(over, eta0, 1e-3),
                  std::invalid_argument);
}

TEST_CASE("adaptive schedule") {
  ProblemConstants c = scalar_constants_with_eps0();
  Schedule s = schedule_adagrad(c, 0.1, 1e-3, 4);
  const double m = 0.5;  // 1/sqrt(3+1)
  CHECK(s.T0 == static_cast<std::int64_t>(std::ceil(
                    212.0 * m / (0.1 * std::min(c.rho, c.mu_y)))));
  CHECK(s.decay * s.growth == doctest::Approx(1.0));
  // eta_k * M_k stays constant across epochs.
  for (int k = 1; k <= 10; ++k) {
    CHECK(s.eta(k) * s.length_real(k) ==
          doctest::Approx(s.eta0 * static_cast<double>(s.T0)));
  }
}

TEST_CASE("outer loop: deterministic and linearly converging") {
  QuadraticGame prob = make_quadratic_game(6, 6, 0.6, 1.0, -0.25, 0.7, 0.0, 42);
  ProblemConstants c = prob.constants();
  c.eps0 = 10.0;

  PesConfig config;
  config.variant = UpdateVariant::kOgda;
  config.schedule = schedule_from_theorem1(c, default_eta0(config.variant, c),
                                           1e-2);
  config.schedule.K = 8;
  config.seed = 17;

  auto trace = pes_solve(prob, config);
  REQUIRE(trace.size() == 8);
  for (size_t i = 1; i < trace.size(); ++i) {
    CHECK(trace[i].oracle_calls > trace[i - 1].oracle_calls);
  }

  const double l_hat = c.L_primal + 2 * c.rho;
  const double cc = 4 * c.rho + (248.0 / 53.0) * l_hat;
  const double contraction = cc / (cc + 2 * c.mu_pl);
  for (size_t i = 1; i < trace.size(); ++i) {
    if (trace[i - 1].objective_gap < 1e-13) continue;
    CHECK(trace[i].objective_gap / trace[i - 1].objective_gap <=
          contraction * 1.25);
  }

  SUBCASE("identical configuration replays identically") {
    auto again = pes_solve(prob, config);
    REQUIRE(again.size() == trace.size());
    for (size_t i = 0; i < trace.size(); ++i) {
      CHECK(again[i].point.x == trace[i].point.x);
      CHECK(again[i].point.y == trace[i].point.y);
      CHECK(again[i].objective_gap == trace[i].objective_gap);
    }
  }

  SUBCASE("single epoch equals the bare subroutine") {
    PesConfig one = config;
    one.schedule.K = 1;
    auto t1 = pes_solve(prob, one);
    REQUIRE(t1.size() == 1);
    RegularizedProblem fk(prob, Vector::Ones(6), one.schedule.gamma);
    std::mt19937_64 rng(one.seed);
    PrimalDualPoint direct =
        ogda_epoch(fk, {Vector::Ones(6), Vector::Zero(6)}, one.schedule.eta(1),
                   one.schedule.length(1), rng);
    CHECK(t1[0].point.x == direct.x);
    CHECK(t1[0].point.y == direct.y);
  }

  SUBCASE("tiny budget stops early and says so") {
    PesConfig tight = config;
    tight.budget = 1;
    auto t = pes_solve(prob, tight);
    REQUIRE(!t.empty());
    CHECK(t.size() <= 2);
    CHECK(t.back().early_stop);
  }

  SUBCASE("adaptive variant demands its parameter block") {
    PesConfig bad = config;
    bad.variant = UpdateVariant::kAdagrad;
    CHECK_THROWS_AS(pes_solve(prob, bad), std::invalid_argument);
  }
}

TEST_CASE("two-timescale baseline") {
  QuadraticGame prob = make_quadratic_game(4, 4, 0.5, 1.0, 0.2, 0.8, 0.0, 8);

  SUBCASE("large lambda limit barely moves") {
    StocAgdaConfig cfg;
    cfg.tau1 = 1.0;
    cfg.tau2 = 1.0;
    cfg.lambda = 1e9;
    cfg.T = 1;
    cfg.stride = 1;
    cfg.init = {Vector::Ones(4), Vector::Ones(4)};
    StocAgdaResult res = stoc_agda(prob, cfg);
    Vector f0 = as_operator(prob.exact_gradient(cfg.init));
    const double moved =
        std::sqrt((res.final_point.x - cfg.init.x).squaredNorm() +
                  (res.final_point.y - cfg.init.y).squaredNorm());
    CHECK(moved <= (1.0 / 1e9) * f0.norm() * 2);
  }

  SUBCASE("objective gap shrinks on a well-conditioned instance") {
    StocAgdaConfig cfg;
    cfg.tau1 = 5.0;
    cfg.tau2 = 5.0;
    cfg.lambda = 10.0;
    cfg.T = 3000;
    cfg.stride = 500;
    cfg.seed = 2;
    StocAgdaResult res = stoc_agda(prob, cfg);
    REQUIRE(res.samples.size() >= 3);
    CHECK(res.samples.back().objective_gap <
          res.samples.front().objective_gap);
    CHECK(res.oracle_calls == 2 * cfg.T);
  }
}
