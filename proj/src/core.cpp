#include "pes/core.hpp"

#include <cmath>

namespace pes {

void check_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) {
    throw std::invalid_argument(std::string(what) +
                                ": non-finite entries");
  }
}

Vector as_operator(const GradientPair& g) {
  Vector out(g.gx.size() + g.gy.size());
  out.head(g.gx.size()) = g.gx;
  out.tail(g.gy.size()) = -g.gy;
  return out;
}

FeasibleSet FeasibleSet::all_space() { return FeasibleSet(); }

FeasibleSet FeasibleSet::ball(Vector center, double radius) {
  if (!(radius > 0.0)) {
    throw std::invalid_argument("FeasibleSet::ball: radius must be > 0");
  }
  check_finite(center, "FeasibleSet::ball center");
  FeasibleSet s;
  s.kind_ = Kind::kBall;
  s.center_ = std::move(center);
  s.radius_ = radius;
  return s;
}

FeasibleSet FeasibleSet::box(Vector lower, Vector upper) {
  if (lower.size() != upper.size()) {
    throw std::invalid_argument("FeasibleSet::box: dimension mismatch");
  }
  if ((lower.array() > upper.array()).any()) {
    throw std::invalid_argument("FeasibleSet::box: lower > upper");
  }
  FeasibleSet s;
  s.kind_ = Kind::kBox;
  s.lower_ = std::move(lower);
  s.upper_ = std::move(upper);
  return s;
}

Vector FeasibleSet::project(const Vector& p) const {
  switch (kind_) {
    case Kind::kAllSpace:
      return p;
    case Kind::kBall: {
      if (p.size() != center_.size()) {
        throw std::invalid_argument("FeasibleSet::project: dimension mismatch");
      }
      Vector diff = p - center_;
      const double norm = diff.norm();
      if (norm <= radius_) return p;
      return center_ + diff * (radius_ / norm);
    }
    case Kind::kBox:
      if (p.size() != lower_.size()) {
        throw std::invalid_argument("FeasibleSet::project: dimension mismatch");
      }
      return p.cwiseMax(lower_).cwiseMin(upper_);
  }
  throw std::logic_error("FeasibleSet::project: unreachable");
}

bool FeasibleSet::contains(const Vector& p, double tol) const {
  switch (kind_) {
    case Kind::kAllSpace:
      return true;
    case Kind::kBall:
      return (p - center_).norm() <= radius_ + tol;
    case Kind::kBox:
      return (p.array() >= lower_.array() - tol).all() &&
             (p.array() <= upper_.array() + tol).all();
  }
  return false;
}

PrimalDualPoint prox_step(const PrimalDualPoint& zbar, const Vector& g,
                          const FeasibleSet& set_y) {
  const Eigen::Index d = zbar.x.size();
  const Eigen::Index dp = zbar.y.size();
  if (g.size() != d + dp) {
    throw std::invalid_argument("prox_step: operator dimension mismatch");
  }
  PrimalDualPoint out;
  out.x = zbar.x - g.head(d);
  out.y = set_y.project(zbar.y - g.tail(dp));
  return out;
}

PrimalDualPoint prox_step_regularized(const PrimalDualPoint& zbar,
                                      const Vector& g, const Vector& x0,
                                      double gamma_eta,
                                      const FeasibleSet& set_y) {
  if (gamma_eta < 0.0) {
    throw std::invalid_argument("prox_step_regularized: gamma_eta < 0");
  }
  const Eigen::Index d = zbar.x.size();
  const Eigen::Index dp = zbar.y.size();
  if (g.size() != d + dp || x0.size() != d) {
    throw std::invalid_argument("prox_step_regularized: dimension mismatch");
  }
  PrimalDualPoint out;
  if (gamma_eta == 0.0) {
    out.x = zbar.x - g.head(d);
  } else {
    // Minimizer of g_x^T x + 1/2||x - xbar||^2 + (gamma_eta/2)||x - x0||^2.
    out.x = (zbar.x - g.head(d) + gamma_eta * x0) / (1.0 + gamma_eta);
  }
  out.y = set_y.project(zbar.y - g.tail(dp));
  return out;
}

}  // namespace pes
