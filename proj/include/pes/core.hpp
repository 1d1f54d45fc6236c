#ifndef PES_CORE_HPP
#define PES_CORE_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>

namespace pes {

using Vector = Eigen::VectorXd;

/// A primal-dual pair z = (x, y). ||z||^2 = ||x||^2 + ||y||^2.
struct PrimalDualPoint {
  Vector x;
  Vector y;

  Eigen::Index dim() const { return x.size() + y.size(); }
  double squared_norm() const { return x.squaredNorm() + y.squaredNorm(); }
};

/// Raw gradient pair (df/dx, df/dy) at a point. The monotone-operator
/// form used by the update rules flips the sign of gy, see as_operator().
struct GradientPair {
  Vector gx;
  Vector gy;
};

/// Concatenates (gx, -gy) into a single vector of dimension d + d'.
Vector as_operator(const GradientPair& g);

/// Closed convex feasible set for the dual block. The primal block always
/// lives on all of R^d and never carries a set.
class FeasibleSet {
 public:
  enum class Kind { kAllSpace, kBall, kBox };

  static FeasibleSet all_space();
  static FeasibleSet ball(Vector center, double radius);
  static FeasibleSet box(Vector lower, Vector upper);

  Kind kind() const { return kind_; }
  const Vector& center() const { return center_; }
  double radius() const { return radius_; }
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }

  /// Euclidean projection onto the set. Idempotent and nonexpansive.
  Vector project(const Vector& p) const;

  /// Membership check with absolute tolerance on the constraint residual.
  bool contains(const Vector& p, double tol = 1e-12) const;

 private:
  FeasibleSet() = default;

  Kind kind_ = Kind::kAllSpace;
  Vector center_;
  double radius_ = 0.0;
  Vector lower_;
  Vector upper_;
};

/// One proximal step: argmin_z  g^T z + 1/2 ||z - zbar||^2  over R^d x Y.
/// The caller passes g already scaled by the step size, in operator form.
PrimalDualPoint prox_step(const PrimalDualPoint& zbar, const Vector& g,
                          const FeasibleSet& set_y);

/// Proximal step with an extra quadratic anchor on the primal block:
/// argmin_z  g^T z + 1/2 ||z - zbar||^2 + (gamma_eta/2) ||x - x0||^2.
/// gamma_eta is the product of the regularization weight and the step
/// size. Reduces to prox_step when gamma_eta == 0.
PrimalDualPoint prox_step_regularized(const PrimalDualPoint& zbar,
                                      const Vector& g, const Vector& x0,
                                      double gamma_eta,
                                      const FeasibleSet& set_y);

/// Throws std::invalid_argument if v contains NaN or Inf.
void check_finite(const Vector& v, const char* what);

}  // namespace pes

#endif  // PES_CORE_HPP
