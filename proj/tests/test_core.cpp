#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "pes/core.hpp"

using namespace pes;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

}  // namespace

TEST_CASE("as_operator flips the sign of the dual block") {
  GradientPair g{vec({1}), vec({2})};
  CHECK(as_operator(g) == vec({1, -2}));
  GradientPair zero{vec({0, 0}), vec({0})};
  CHECK(as_operator(zero) == vec({0, 0, 0}));
  GradientPair neg{vec({3}), vec({-4})};
  CHECK(as_operator(neg) == vec({3, 4}));
}

TEST_CASE("projection onto each set variant") {
  CHECK(FeasibleSet::all_space().project(vec({5, -3})) == vec({5, -3}));

  auto ball = FeasibleSet::ball(vec({0, 0}), 1.0);
  CHECK(ball.project(vec({0, 2})) == vec({0, 1}));

  auto box = FeasibleSet::box(vec({-1}), vec({1}));
  CHECK(box.project(vec({1.5})) == vec({1}));
}

TEST_CASE("projection is idempotent and nonexpansive") {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> gauss(0.0, 2.0);
  auto rand_vec = [&](Eigen::Index n) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = gauss(rng);
    return v;
  };
  const FeasibleSet sets[] = {
      FeasibleSet::all_space(),
      FeasibleSet::ball(rand_vec(5), 0.7),
      FeasibleSet::box(vec({-1, -2, 0, -0.5, -3}), vec({1, 0, 2, 0.5, 3}))};
  for (const auto& s : sets) {
    for (int it = 0; it < 50; ++it) {
      Vector p = rand_vec(5), q = rand_vec(5);
      Vector pp = s.project(p);
      CHECK((s.project(pp) - pp).norm() <= 1e-14);  // idempotent up to ulps
      CHECK((s.project(p) - s.project(q)).norm() <= (p - q).norm() + 1e-12);
      CHECK(s.contains(pp, 1e-12));
    }
  }
}

TEST_CASE("set constructors validate their inputs") {
  CHECK_THROWS_AS(FeasibleSet::ball(vec({0}), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(FeasibleSet::ball(vec({0}), -1.0), std::invalid_argument);
  CHECK_THROWS_AS(FeasibleSet::box(vec({1}), vec({0})), std::invalid_argument);
  CHECK_THROWS_AS(FeasibleSet::box(vec({0, 0}), vec({1})),
                  std::invalid_argument);
}

TEST_CASE("prox step: unconstrained move then dual projection") {
  auto ball = FeasibleSet::ball(vec({0}), 1.0);
  PrimalDualPoint z{vec({0}), vec({0})};
  PrimalDualPoint out = prox_step(z, vec({0, 2}), ball);
  CHECK(out.x == vec({0}));
  CHECK(out.y == vec({-1}));

  PrimalDualPoint fixed{vec({1}), vec({1})};
  PrimalDualPoint same = prox_step(fixed, vec({0, 0}), FeasibleSet::all_space());
  CHECK(same.x == vec({1}));
  CHECK(same.y == vec({1}));

  // First half-step of the optimistic recursion on f(x,y) = x*y at (1,0)
  // with step 0.1: the operator there is (y, -x) = (0, -1).
  PrimalDualPoint z0{vec({1}), vec({0})};
  PrimalDualPoint half = prox_step(z0, vec({0, -0.1}), FeasibleSet::all_space());
  CHECK(half.x(0) == doctest::Approx(1.0));
  CHECK(half.y(0) == doctest::Approx(0.1));
}

TEST_CASE("prox step over all space is an exact subtraction") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss;
  for (int it = 0; it < 20; ++it) {
    PrimalDualPoint z{Vector::NullaryExpr(3, [&](Eigen::Index) { return gauss(rng); }),
                      Vector::NullaryExpr(2, [&](Eigen::Index) { return gauss(rng); })};
    Vector g = Vector::NullaryExpr(5, [&](Eigen::Index) { return gauss(rng); });
    PrimalDualPoint out = prox_step(z, g, FeasibleSet::all_space());
    CHECK((out.x - (z.x - g.head(3))).norm() == 0.0);
    CHECK((out.y - (z.y - g.tail(2))).norm() == 0.0);
  }
}

TEST_CASE("anchored prox step") {
  PrimalDualPoint z{vec({1}), vec({0})};
  PrimalDualPoint out = prox_step_regularized(z, vec({0.1, 0}), vec({1}), 0.1,
                                              FeasibleSet::all_space());
  // argmin 0.1 x + (x-1)^2/2 + 0.05 (x-1)^2 = 1/1.1.
  CHECK(out.x(0) == doctest::Approx((1.0 - 0.1 + 0.1) / 1.1));
  CHECK(out.x(0) == doctest::Approx(1.0 / 1.1 + 0.0).epsilon(1e-12));
  CHECK(out.y(0) == 0.0);

  SUBCASE("zero weight matches the plain step bit for bit") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> gauss;
    for (int it = 0; it < 20; ++it) {
      PrimalDualPoint zb{
          Vector::NullaryExpr(4, [&](Eigen::Index) { return gauss(rng); }),
          Vector::NullaryExpr(3, [&](Eigen::Index) { return gauss(rng); })};
      Vector g = Vector::NullaryExpr(7, [&](Eigen::Index) { return gauss(rng); });
      Vector x0 = Vector::NullaryExpr(4, [&](Eigen::Index) { return gauss(rng); });
      auto set = FeasibleSet::ball(Vector::Zero(3), 0.5);
      PrimalDualPoint a = prox_step(zb, g, set);
      PrimalDualPoint b = prox_step_regularized(zb, g, x0, 0.0, set);
      CHECK(a.x == b.x);
      CHECK(a.y == b.y);
    }
  }

  SUBCASE("anchor is a fixed point under zero gradient") {
    PrimalDualPoint at{vec({2}), vec({0})};
    PrimalDualPoint res = prox_step_regularized(at, vec({0, 0}), vec({2}), 5.0,
                                                FeasibleSet::all_space());
    CHECK(res.x(0) == 2.0);
  }

  SUBCASE("negative weight rejected") {
    CHECK_THROWS_AS(prox_step_regularized(z, vec({0, 0}), vec({1}), -0.1,
                                          FeasibleSet::all_space()),
                    std::invalid_argument);
  }
}
