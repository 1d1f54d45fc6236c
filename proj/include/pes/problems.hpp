#ifndef PES_PROBLEMS_HPP
#define PES_PROBLEMS_HPP

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "pes/core.hpp"

namespace pes {

/// Regularity constants declared by a problem. A value of 0 means
/// "unknown / not declared" for the optional ones (mu_pl, mu_x_pl, B,
/// eps0); the required ones must be positive.
struct ProblemConstants {
  double ell = 0.0;      // Lipschitz constant of the gradient operator
  double mu_y = 0.0;     // strong concavity modulus in y
  double rho = 0.0;      // weak convexity modulus in x
  double L_primal = 0.0; // smoothness of the primal objective P
  double mu_pl = 0.0;    // PL constant of P (0 = unknown)
  double mu_x_pl = 0.0;  // x-side PL constant (0 = unknown)
  double sigma = 0.0;    // stochastic gradient noise bound
  double B = 0.0;        // second-moment bound (0 = unknown)
  double eps0 = 0.0;     // bound on the initial gap (0 = unknown)
};

/// Stochastic saddle-point problem oracle bundle.
///
/// Required capabilities: dims, dual feasible set, value, exact gradient,
/// unbiased stochastic gradient, declared constants. Optional capabilities
/// are guarded by has_*() and throw std::logic_error when absent.
class SaddleProblem {
 public:
  virtual ~SaddleProblem() = default;

  virtual Eigen::Index dim_x() const = 0;
  virtual Eigen::Index dim_y() const = 0;
  virtual const FeasibleSet& domain_y() const = 0;
  virtual const ProblemConstants& constants() const = 0;

  virtual double value(const PrimalDualPoint& z) const = 0;
  virtual GradientPair exact_gradient(const PrimalDualPoint& z) const = 0;
  virtual GradientPair stochastic_gradient(const PrimalDualPoint& z,
                                           std::mt19937_64& rng,
                                           int batch_size = 1) const = 0;

  virtual bool has_primal_value() const { return false; }
  virtual double primal_value(const Vector& x) const;
  /// min over x of the primal objective P.
  virtual double primal_optimum() const;

  virtual bool has_best_response_y() const { return false; }
  virtual Vector best_response_y(const Vector& x) const;

  /// argmin over x of f(x, y); only when finite for all y.
  virtual bool has_best_response_x() const { return false; }
  virtual Vector best_response_x(const Vector& y) const;

  /// argmin over x of f(x, y) + (gamma/2)||x - x0||^2.
  virtual bool has_best_response_x_regularized() const { return false; }
  virtual Vector best_response_x_regularized(const Vector& y,
                                             const Vector& x0,
                                             double gamma) const;

  virtual bool has_saddle_point() const { return false; }
  virtual PrimalDualPoint saddle_point() const;
};

/// f(x, y) = x^T A y - (mu_y/2)||y||^2 + (q/2)||x||^2 with optional
/// isotropic Gaussian noise of total variance sigma^2 on the stochastic
/// gradient. q < 0 makes f weakly convex in x with rho = -q.
class QuadraticGame final : public SaddleProblem {
 public:
  QuadraticGame(Eigen::MatrixXd coupling, double q, double mu_y,
                double noise_sigma,
                FeasibleSet domain_y = FeasibleSet::all_space());

  Eigen::Index dim_x() const override { return coupling_.rows(); }
  Eigen::Index dim_y() const override { return coupling_.cols(); }
  const FeasibleSet& domain_y() const override { return domain_y_; }
  const ProblemConstants& constants() const override { return constants_; }

  double value(const PrimalDualPoint& z) const override;
  GradientPair exact_gradient(const PrimalDualPoint& z) const override;
  GradientPair stochastic_gradient(const PrimalDualPoint& z,
                                   std::mt19937_64& rng,
                                   int batch_size = 1) const override;

  bool has_primal_value() const override { return true; }
  double primal_value(const Vector& x) const override;
  double primal_optimum() const override;

  bool has_best_response_y() const override { return true; }
  Vector best_response_y(const Vector& x) const override;

  bool has_best_response_x() const override { return q_ > 0.0; }
  Vector best_response_x(const Vector& y) const override;

  bool has_best_response_x_regularized() const override { return true; }
  Vector best_response_x_regularized(const Vector& y, const Vector& x0,
                                     double gamma) const override;

  bool has_saddle_point() const override;
  PrimalDualPoint saddle_point() const override;

  const Eigen::MatrixXd& coupling() const { return coupling_; }
  double q() const { return q_; }
  double mu_y() const { return mu_y_; }

  /// Hessian of the primal objective, A A^T / mu_y + q I.
  Eigen::MatrixXd primal_hessian() const;

 private:
  Eigen::MatrixXd coupling_;
  double q_;
  double mu_y_;
  double noise_sigma_;
  FeasibleSet domain_y_;
  ProblemConstants constants_;
};

/// Builds a quadratic game whose coupling matrix has singular values
/// evenly spaced in [sv_min, sv_max], with random orthogonal factors
/// drawn deterministically from the seed.
QuadraticGame make_quadratic_game(Eigen::Index d, Eigen::Index dp,
                                  double sv_min, double sv_max, double q,
                                  double mu_y, double noise_sigma,
                                  std::uint64_t seed);

/// Synthetic two-Gaussian binary classification sample with a controlled
/// positive-class fraction. Reproducible from the seed.
struct SyntheticImbalancedDataset {
  Eigen::MatrixXd features;       // n x d
  Eigen::VectorXd labels;         // +1 / -1 per row
  double positive_ratio = 0.0;    // achieved fraction of positives

  Eigen::Index size() const { return features.rows(); }
  Eigen::Index dim() const { return features.cols(); }
};

SyntheticImbalancedDataset make_synthetic_dataset(Eigen::Index n,
                                                  Eigen::Index d,
                                                  double positive_ratio,
                                                  std::uint64_t seed);

/// Writes the dataset as CSV with header "f0,...,f{d-1},label" and the
/// +-1 label in the last column.
void write_dataset_csv(const SyntheticImbalancedDataset& data,
                       const std::string& path);
SyntheticImbalancedDataset read_dataset_csv(const std::string& path);

/// Square-loss AUC surrogate with a linear scorer. The primal block packs
/// (w, a, b) into x of dimension d + 2, the dual is the scalar alpha.
/// Strongly concave in alpha with mu_y = 2 p (1 - p) where p is the
/// positive-class fraction of the training sample.
class AucLinearProblem final : public SaddleProblem {
 public:
  AucLinearProblem(SyntheticImbalancedDataset data, int batch_size = 128);

  Eigen::Index dim_x() const override { return data_.dim() + 2; }
  Eigen::Index dim_y() const override { return 1; }
  const FeasibleSet& domain_y() const override { return domain_y_; }
  const ProblemConstants& constants() const override { return constants_; }

  double value(const PrimalDualPoint& z) const override;
  GradientPair exact_gradient(const PrimalDualPoint& z) const override;
  GradientPair stochastic_gradient(const PrimalDualPoint& z,
                                   std::mt19937_64& rng,
                                   int batch_size = 0) const override;

  bool has_primal_value() const override { return true; }
  double primal_value(const Vector& x) const override;

  bool has_best_response_y() const override { return true; }
  Vector best_response_y(const Vector& x) const override;

  const SyntheticImbalancedDataset& data() const { return data_; }
  double positive_fraction() const { return p_; }
  int default_batch_size() const { return batch_size_; }

  /// Linear score w^T v of sample row i under the packed primal x.
  double score(const Vector& x, Eigen::Index i) const;

 private:
  double sample_value(const Vector& x, double alpha, Eigen::Index i) const;
  void accumulate_sample_gradient(const Vector& x, double alpha,
                                  Eigen::Index i, Vector& gx,
                                  double& galpha) const;

  SyntheticImbalancedDataset data_;
  int batch_size_;
  double p_;
  FeasibleSet domain_y_;
  ProblemConstants constants_;
};

AucLinearProblem make_synthetic_auc(Eigen::Index n, Eigen::Index d,
                                    double positive_ratio,
                                    std::uint64_t seed,
                                    int batch_size = 128);

/// Sampled check of the declared regularity constants.
struct RegularityReport {
  double ell_hat = 0.0;   // max sampled gradient-operator Lipschitz ratio
  double mu_y_hat = 0.0;  // min sampled concavity modulus in y
  double rho_hat = 0.0;   // max sampled weak-convexity deficit in x
  std::vector<std::string> violations;
};

RegularityReport check_regularity(const SaddleProblem& prob,
                                  int sample_count, std::mt19937_64& rng);

/// View of a base problem with the epoch regularizer
/// (gamma/2)||x - x0||^2 folded into value and gradients.
class RegularizedProblem final : public SaddleProblem {
 public:
  RegularizedProblem(const SaddleProblem& base, Vector anchor_x,
                     double gamma);

  Eigen::Index dim_x() const override { return base_.dim_x(); }
  Eigen::Index dim_y() const override { return base_.dim_y(); }
  const FeasibleSet& domain_y() const override { return base_.domain_y(); }
  const ProblemConstants& constants() const override { return constants_; }

  double value(const PrimalDualPoint& z) const override;
  GradientPair exact_gradient(const PrimalDualPoint& z) const override;
  GradientPair stochastic_gradient(const PrimalDualPoint& z,
                                   std::mt19937_64& rng,
                                   int batch_size = 1) const override;

  bool has_best_response_y() const override {
    return base_.has_best_response_y();
  }
  Vector best_response_y(const Vector& x) const override {
    return base_.best_response_y(x);
  }

  bool has_best_response_x() const override {
    return base_.has_best_response_x_regularized();
  }
  Vector best_response_x(const Vector& y) const override {
    return base_.best_response_x_regularized(y, anchor_x_, gamma_);
  }

  const Vector& anchor() const { return anchor_x_; }
  double gamma() const { return gamma_; }

 private:
  const SaddleProblem& base_;
  Vector anchor_x_;
  double gamma_;
  ProblemConstants constants_;
};

}  // namespace pes

#endif  // PES_PROBLEMS_HPP
