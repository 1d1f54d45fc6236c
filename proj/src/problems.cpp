#include "pes/problems.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace pes {

namespace {

double spectral_norm(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

}  // namespace

double SaddleProblem::primal_value(const Vector&) const {
  throw std::logic_error("primal_value: capability not provided");
}

double SaddleProblem::primal_optimum() const {
  throw std::logic_error("primal_optimum: capability not provided");
}

Vector SaddleProblem::best_response_y(const Vector&) const {
  throw std::logic_error("best_response_y: capability not provided");
}

Vector SaddleProblem::best_response_x(const Vector&) const {
  throw std::logic_error("best_response_x: capability not provided");
}

Vector SaddleProblem::best_response_x_regularized(const Vector&,
                                                  const Vector&,
                                                  double) const {
  throw std::logic_error(
      "best_response_x_regularized: capability not provided");
}

PrimalDualPoint SaddleProblem::saddle_point() const {
  throw std::logic_error("saddle_point: capability not provided");
}

// ---------------------------------------------------------------------------
// QuadraticGame

QuadraticGame::QuadraticGame(Eigen::MatrixXd coupling, double q, double mu_y,
                             double noise_sigma, FeasibleSet domain_y)
    : coupling_(std::move(coupling)),
      q_(q),
      mu_y_(mu_y),
      noise_sigma_(noise_sigma),
      domain_y_(std::move(domain_y)) {
  if (!(mu_y_ > 0.0)) {
    throw std::invalid_argument("QuadraticGame: mu_y must be > 0");
  }
  if (noise_sigma_ < 0.0) {
    throw std::invalid_argument("QuadraticGame: noise_sigma < 0");
  }
  const Eigen::Index d = coupling_.rows();
  const Eigen::Index dp = coupling_.cols();

  // Jacobian of the gradient operator F(z) = (Ay + qx, -(A^T x - mu_y y)).
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(d + dp, d + dp);
  jac.topLeftCorner(d, d) = q_ * Eigen::MatrixXd::Identity(d, d);
  jac.topRightCorner(d, dp) = coupling_;
  jac.bottomLeftCorner(dp, d) = -coupling_.transpose();
  jac.bottomRightCorner(dp, dp) = mu_y_ * Eigen::MatrixXd::Identity(dp, dp);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(primal_hessian());
  const Vector& evals = eig.eigenvalues();

  constants_.ell = spectral_norm(jac);
  constants_.mu_y = mu_y_;
  constants_.rho = std::max(-q_, 0.0);
  constants_.L_primal = std::max(std::abs(evals(evals.size() - 1)),
                                 std::abs(evals(0)));
  constants_.mu_pl = evals(0) > 0.0 ? evals(0) : 0.0;
  constants_.mu_x_pl = std::max(q_, 0.0);
  constants_.sigma = noise_sigma_;
}

Eigen::MatrixXd QuadraticGame::primal_hessian() const {
  const Eigen::Index d = coupling_.rows();
  return coupling_ * coupling_.transpose() / mu_y_ +
         q_ * Eigen::MatrixXd::Identity(d, d);
}

double QuadraticGame::value(const PrimalDualPoint& z) const {
  return z.x.dot(coupling_ * z.y) - 0.5 * mu_y_ * z.y.squaredNorm() +
         0.5 * q_ * z.x.squaredNorm();
}

GradientPair QuadraticGame::exact_gradient(const PrimalDualPoint& z) const {
  GradientPair g;
  g.gx = coupling_ * z.y + q_ * z.x;
  g.gy = coupling_.transpose() * z.x - mu_y_ * z.y;
  return g;
}

GradientPair QuadraticGame::stochastic_gradient(const PrimalDualPoint& z,
                                                std::mt19937_64& rng,
                                                int batch_size) const {
  GradientPair g = exact_gradient(z);
  if (noise_sigma_ > 0.0) {
    if (batch_size < 1) {
      throw std::invalid_argument("stochastic_gradient: batch_size < 1");
    }
    // Total noise variance sigma^2 spread over all d + d' coordinates,
    // reduced by averaging over the minibatch.
    const double stddev = noise_sigma_ /
                          std::sqrt(static_cast<double>(dim_x() + dim_y()) *
                                    static_cast<double>(batch_size));
    std::normal_distribution<double> noise(0.0, stddev);
    for (Eigen::Index i = 0; i < g.gx.size(); ++i) g.gx(i) += noise(rng);
    for (Eigen::Index i = 0; i < g.gy.size(); ++i) g.gy(i) += noise(rng);
  }
  return g;
}

Vector QuadraticGame::best_response_y(const Vector& x) const {
  Vector b = coupling_.transpose() * x;
  switch (domain_y_.kind()) {
    case FeasibleSet::Kind::kAllSpace:
      return b / mu_y_;
    case FeasibleSet::Kind::kBall: {
      // Maximize b^T y - (mu_y/2)||y||^2 over ||y - c|| <= r. The
      // unconstrained maximizer is b/mu_y; if it leaves the ball, the
      // isotropic curvature puts the maximizer on the segment toward it.
      Vector u = b / mu_y_ - domain_y_.center();
      const double norm = u.norm();
      if (norm <= domain_y_.radius()) return domain_y_.center() + u;
      return domain_y_.center() + u * (domain_y_.radius() / norm);
    }
    case FeasibleSet::Kind::kBox:
      return (b / mu_y_)
          .cwiseMax(domain_y_.lower())
          .cwiseMin(domain_y_.upper());
  }
  throw std::logic_error("best_response_y: unreachable");
}

double QuadraticGame::primal_value(const Vector& x) const {
  if (domain_y_.kind() == FeasibleSet::Kind::kAllSpace) {
    return (coupling_.transpose() * x).squaredNorm() / (2.0 * mu_y_) +
           0.5 * q_ * x.squaredNorm();
  }
  PrimalDualPoint z{x, best_response_y(x)};
  return value(z);
}

double QuadraticGame::primal_optimum() const {
  if (domain_y_.kind() == FeasibleSet::Kind::kAllSpace) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(primal_hessian());
    if (eig.eigenvalues()(0) < -1e-12) {
      throw std::logic_error("primal_optimum: primal objective unbounded");
    }
    return 0.0;
  }
  if (q_ >= 0.0 && domain_y_.contains(Vector::Zero(dim_y()))) return 0.0;
  throw std::logic_error("primal_optimum: no closed form for this domain");
}

Vector QuadraticGame::best_response_x(const Vector& y) const {
  if (!(q_ > 0.0)) {
    throw std::logic_error("best_response_x: f(.,y) has no finite minimizer");
  }
  return -(coupling_ * y) / q_;
}

Vector QuadraticGame::best_response_x_regularized(const Vector& y,
                                                  const Vector& x0,
                                                  double gamma) const {
  if (!(q_ + gamma > 0.0)) {
    throw std::invalid_argument(
        "best_response_x_regularized: q + gamma <= 0, regularized problem "
        "not strongly convex in x");
  }
  return (gamma * x0 - coupling_ * y) / (q_ + gamma);
}

bool QuadraticGame::has_saddle_point() const {
  return q_ >= 0.0 && domain_y_.contains(Vector::Zero(dim_y()));
}

PrimalDualPoint QuadraticGame::saddle_point() const {
  if (!has_saddle_point()) {
    throw std::logic_error("saddle_point: capability not provided");
  }
  return {Vector::Zero(dim_x()), Vector::Zero(dim_y())};
}

QuadraticGame make_quadratic_game(Eigen::Index d, Eigen::Index dp,
                                  double sv_min, double sv_max, double q,
                                  double mu_y, double noise_sigma,
                                  std::uint64_t seed) {
  if (sv_min <= 0.0 || sv_max < sv_min) {
    throw std::invalid_argument("make_quadratic_game: bad singular values");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto random_orthogonal = [&](Eigen::Index m) {
    Eigen::MatrixXd g(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j) g(i, j) = gauss(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd qmat = qr.householderQ();
    return qmat;
  };
  Eigen::MatrixXd u = random_orthogonal(d);
  Eigen::MatrixXd v = random_orthogonal(dp);
  const Eigen::Index r = std::min(d, dp);
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(d, dp);
  for (Eigen::Index i = 0; i < r; ++i) {
    s(i, i) = r == 1 ? sv_max
                     : sv_min + (sv_max - sv_min) * static_cast<double>(i) /
                                    static_cast<double>(r - 1);
  }
  return QuadraticGame(u * s * v.transpose(), q, mu_y, noise_sigma);
}

// ---------------------------------------------------------------------------
// Synthetic dataset

SyntheticImbalancedDataset make_synthetic_dataset(Eigen::Index n,
                                                  Eigen::Index d,
                                                  double positive_ratio,
                                                  std::uint64_t seed) {
  if (n < 10) throw std::invalid_argument("make_synthetic_dataset: n < 10");
  if (!(positive_ratio > 0.0 && positive_ratio < 1.0)) {
    throw std::invalid_argument("make_synthetic_dataset: ratio out of (0,1)");
  }
  const auto n_pos = static_cast<Eigen::Index>(
      std::llround(positive_ratio * static_cast<double>(n)));
  if (n_pos < 1 || n_pos >= n) {
    throw std::invalid_argument(
        "make_synthetic_dataset: degenerate ratio, one class empty");
  }

  // Class-conditional Gaussians with unit covariance; means separated so
  // the Bayes direction scores well above chance.
  const double shift = 1.25 / std::sqrt(static_cast<double>(d));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  SyntheticImbalancedDataset data;
  data.features.resize(n, d);
  data.labels.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const bool positive = i < n_pos;
    const double mean = positive ? shift : -shift;
    for (Eigen::Index j = 0; j < d; ++j) {
      data.features(i, j) = mean + gauss(rng);
    }
    data.labels(i) = positive ? 1.0 : -1.0;
  }
  data.positive_ratio =
      static_cast<double>(n_pos) / static_cast<double>(n);
  return data;
}

void write_dataset_csv(const SyntheticImbalancedDataset& data,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_dataset_csv: cannot open " + path);
  for (Eigen::Index j = 0; j < data.dim(); ++j) out << "f" << j << ",";
  out << "label\n";
  char buf[40];
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    for (Eigen::Index j = 0; j < data.dim(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", data.features(i, j));
      out << buf << ",";
    }
    out << (data.labels(i) > 0 ? "1" : "-1") << "\n";
  }
}

SyntheticImbalancedDataset read_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_dataset_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("read_dataset_csv: empty file " + path);
  }
  const auto cols = static_cast<Eigen::Index>(
      std::count(line.begin(), line.end(), ',') + 1);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (static_cast<Eigen::Index>(row.size()) != cols) {
      throw std::runtime_error("read_dataset_csv: ragged row in " + path);
    }
    rows.push_back(std::move(row));
  }
  SyntheticImbalancedDataset data;
  const auto n = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index d = cols - 1;
  data.features.resize(n, d);
  data.labels.resize(n);
  Eigen::Index n_pos = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) data.features(i, j) = rows[i][j];
    data.labels(i) = rows[i][d];
    if (data.labels(i) > 0) ++n_pos;
  }
  data.positive_ratio = n > 0 ? static_cast<double>(n_pos) / n : 0.0;
  return data;
}

// ---------------------------------------------------------------------------
// AucLinearProblem

AucLinearProblem::AucLinearProblem(SyntheticImbalancedDataset data,
                                   int batch_size)
    : data_(std::move(data)),
      batch_size_(batch_size),
      domain_y_(FeasibleSet::all_space()) {
  if (batch_size_ < 1) {
    throw std::invalid_argument("AucLinearProblem: batch_size < 1");
  }
  Eigen::Index n_pos = 0;
  for (Eigen::Index i = 0; i < data_.size(); ++i) {
    if (data_.labels(i) > 0) ++n_pos;
  }
  if (n_pos == 0 || n_pos == data_.size()) {
    throw std::invalid_argument("AucLinearProblem: single-class data");
  }
  p_ = static_cast<double>(n_pos) / static_cast<double>(data_.size());

  constants_.mu_y = 2.0 * p_ * (1.0 - p_);
  constants_.rho = 0.0;

  // f is quadratic, so the gradient operator is affine; recover its
  // Jacobian column by column from exact gradients at basis points.
  const Eigen::Index dim = dim_x() + dim_y();
  PrimalDualPoint origin{Vector::Zero(dim_x()), Vector::Zero(dim_y())};
  Vector f0 = as_operator(exact_gradient(origin));
  Eigen::MatrixXd jac(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    PrimalDualPoint e = origin;
    if (i < dim_x()) {
      e.x(i) = 1.0;
    } else {
      e.y(i - dim_x()) = 1.0;
    }
    jac.col(i) = as_operator(exact_gradient(e)) - f0;
  }
  constants_.ell = spectral_norm(jac);

  // P(x) = f(x, alpha_hat(x)) is a convex quadratic; its PL constant is
  // the smallest nonzero Hessian eigenvalue.
  Eigen::MatrixXd hess_p(dim_x(), dim_x());
  auto primal_grad = [&](const Vector& x) {
    PrimalDualPoint z{x, best_response_y(x)};
    return exact_gradient(z).gx;
  };
  Vector p0 = primal_grad(Vector::Zero(dim_x()));
  for (Eigen::Index i = 0; i < dim_x(); ++i) {
    Vector e = Vector::Zero(dim_x());
    e(i) = 1.0;
    hess_p.col(i) = primal_grad(e) - p0;
  }
  hess_p = 0.5 * (hess_p + hess_p.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hess_p);
  const Vector& evals = eig.eigenvalues();
  constants_.L_primal = evals(evals.size() - 1);
  double mu_pl = 0.0;
  for (Eigen::Index i = 0; i < evals.size(); ++i) {
    if (evals(i) > 1e-9 * std::max(1.0, constants_.L_primal)) {
      mu_pl = evals(i);
      break;
    }
  }
  constants_.mu_pl = mu_pl;
}

double AucLinearProblem::score(const Vector& x, Eigen::Index i) const {
  return data_.features.row(i).dot(x.head(data_.dim()));
}

double AucLinearProblem::sample_value(const Vector& x, double alpha,
                                      Eigen::Index i) const {
  const double s = score(x, i);
  const double a = x(data_.dim());
  const double b = x(data_.dim() + 1);
  double v = -p_ * (1.0 - p_) * alpha * alpha;
  if (data_.labels(i) > 0) {
    v += (1.0 - p_) * (s - a) * (s - a);
    v -= 2.0 * (1.0 + alpha) * (1.0 - p_) * s;
  } else {
    v += p_ * (s - b) * (s - b);
    v += 2.0 * (1.0 + alpha) * p_ * s;
  }
  return v;
}

void AucLinearProblem::accumulate_sample_gradient(const Vector& x,
                                                  double alpha,
                                                  Eigen::Index i, Vector& gx,
                                                  double& galpha) const {
  const Eigen::Index d = data_.dim();
  const double s = score(x, i);
  const double a = x(d);
  const double b = x(d + 1);
  galpha += -2.0 * p_ * (1.0 - p_) * alpha;
  if (data_.labels(i) > 0) {
    const double c = 2.0 * (1.0 - p_) * (s - a) - 2.0 * (1.0 + alpha) * (1.0 - p_);
    gx.head(d) += c * data_.features.row(i).transpose();
    gx(d) += -2.0 * (1.0 - p_) * (s - a);
    galpha += -2.0 * (1.0 - p_) * s;
  } else {
    const double c = 2.0 * p_ * (s - b) + 2.0 * (1.0 + alpha) * p_;
    gx.head(d) += c * data_.features.row(i).transpose();
    gx(d + 1) += -2.0 * p_ * (s - b);
    galpha += 2.0 * p_ * s;
  }
}

double AucLinearProblem::value(const PrimalDualPoint& z) const {
  double total = 0.0;
  for (Eigen::Index i = 0; i < data_.size(); ++i) {
    total += sample_value(z.x, z.y(0), i);
  }
  return total / static_cast<double>(data_.size());
}

GradientPair AucLinearProblem::exact_gradient(const PrimalDualPoint& z) const {
  GradientPair g{Vector::Zero(dim_x()), Vector::Zero(1)};
  double galpha = 0.0;
  for (Eigen::Index i = 0; i < data_.size(); ++i) {
    accumulate_sample_gradient(z.x, z.y(0), i, g.gx, galpha);
  }
  g.gx /= static_cast<double>(data_.size());
  g.gy(0) = galpha / static_cast<double>(data_.size());
  return g;
}

GradientPair AucLinearProblem::stochastic_gradient(const PrimalDualPoint& z,
                                                   std::mt19937_64& rng,
                                                   int batch_size) const {
  const int batch = batch_size > 0 ? batch_size : batch_size_;
  std::uniform_int_distribution<Eigen::Index> pick(0, data_.size() - 1);
  GradientPair g{Vector::Zero(dim_x()), Vector::Zero(1)};
  double galpha = 0.0;
  for (int b = 0; b < batch; ++b) {
    accumulate_sample_gradient(z.x, z.y(0), pick(rng), g.gx, galpha);
  }
  g.gx /= static_cast<double>(batch);
  g.gy(0) = galpha / static_cast<double>(batch);
  return g;
}

Vector AucLinearProblem::best_response_y(const Vector& x) const {
  // Concave scalar quadratic in alpha; the stationary point works out to
  // the negative-class mean score minus the positive-class mean score.
  double sum_pos = 0.0, sum_neg = 0.0;
  Eigen::Index n_pos = 0;
  for (Eigen::Index i = 0; i < data_.size(); ++i) {
    const double s = score(x, i);
    if (data_.labels(i) > 0) {
      sum_pos += s;
      ++n_pos;
    } else {
      sum_neg += s;
    }
  }
  const double mean_pos = sum_pos / static_cast<double>(n_pos);
  const double mean_neg =
      sum_neg / static_cast<double>(data_.size() - n_pos);
  Vector alpha(1);
  alpha(0) = mean_neg - mean_pos;
  return alpha;
}

double AucLinearProblem::primal_value(const Vector& x) const {
  PrimalDualPoint z{x, best_response_y(x)};
  return value(z);
}

AucLinearProblem make_synthetic_auc(Eigen::Index n, Eigen::Index d,
                                    double positive_ratio,
                                    std::uint64_t seed, int batch_size) {
  return AucLinearProblem(make_synthetic_dataset(n, d, positive_ratio, seed),
                          batch_size);
}

// ---------------------------------------------------------------------------
// Regularity checking

RegularityReport check_regularity(const SaddleProblem& prob,
                                  int sample_count, std::mt19937_64& rng) {
  RegularityReport report;
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto random_point = [&](double scale) {
    PrimalDualPoint z{Vector(prob.dim_x()), Vector(prob.dim_y())};
    for (Eigen::Index i = 0; i < z.x.size(); ++i) z.x(i) = scale * gauss(rng);
    for (Eigen::Index i = 0; i < z.y.size(); ++i) z.y(i) = scale * gauss(rng);
    z.y = prob.domain_y().project(z.y);
    return z;
  };

  const double h = 1e-4;
  double min_curv_x = std::numeric_limits<double>::infinity();
  double min_neg_curv_y = std::numeric_limits<double>::infinity();
  for (int s = 0; s < sample_count; ++s) {
    PrimalDualPoint za = random_point(2.0);
    PrimalDualPoint zb = random_point(2.0);
    Vector fa = as_operator(prob.exact_gradient(za));
    Vector fb = as_operator(prob.exact_gradient(zb));
    const double dist =
        std::sqrt((za.x - zb.x).squaredNorm() + (za.y - zb.y).squaredNorm());
    if (dist > 1e-12) {
      report.ell_hat = std::max(report.ell_hat, (fa - fb).norm() / dist);
    }

    // Directional second differences probe curvature in each block.
    Vector ux(prob.dim_x());
    for (Eigen::Index i = 0; i < ux.size(); ++i) ux(i) = gauss(rng);
    ux.normalize();
    PrimalDualPoint zp = za, zm = za;
    zp.x += h * ux;
    zm.x -= h * ux;
    const double curv_x =
        (prob.value(zp) - 2.0 * prob.value(za) + prob.value(zm)) / (h * h);
    min_curv_x = std::min(min_curv_x, curv_x);

    Vector uy(prob.dim_y());
    for (Eigen::Index i = 0; i < uy.size(); ++i) uy(i) = gauss(rng);
    uy.normalize();
    zp = za;
    zm = za;
    zp.y += h * uy;
    zm.y -= h * uy;
    const double curv_y =
        (prob.value(zp) - 2.0 * prob.value(za) + prob.value(zm)) / (h * h);
    min_neg_curv_y = std::min(min_neg_curv_y, -curv_y);
  }
  report.rho_hat = std::max(0.0, -min_curv_x);
  report.mu_y_hat = min_neg_curv_y;

  const ProblemConstants& c = prob.constants();
  const double slack = 1e-5;
  if (report.ell_hat > c.ell * (1.0 + 1e-6) + slack) {
    report.violations.push_back("ell_hat exceeds declared ell");
  }
  if (report.rho_hat > c.rho * (1.0 + 1e-6) + slack) {
    report.violations.push_back("rho_hat exceeds declared rho");
  }
  if (report.mu_y_hat < c.mu_y * (1.0 - 1e-6) - slack) {
    report.violations.push_back("mu_y_hat below declared mu_y");
  }
  return report;
}

// ---------------------------------------------------------------------------
// RegularizedProblem

RegularizedProblem::RegularizedProblem(const SaddleProblem& base,
                                       Vector anchor_x, double gamma)
    : base_(base), anchor_x_(std::move(anchor_x)), gamma_(gamma) {
  if (gamma_ < 0.0) {
    throw std::invalid_argument("RegularizedProblem: gamma < 0");
  }
  if (anchor_x_.size() != base_.dim_x()) {
    throw std::invalid_argument("RegularizedProblem: anchor dimension");
  }
  constants_ = base_.constants();
  constants_.ell += gamma_;
  constants_.rho = std::max(constants_.rho - gamma_, 0.0);
  constants_.L_primal += gamma_;
}

double RegularizedProblem::value(const PrimalDualPoint& z) const {
  return base_.value(z) + 0.5 * gamma_ * (z.x - anchor_x_).squaredNorm();
}

GradientPair RegularizedProblem::exact_gradient(
    const PrimalDualPoint& z) const {
  GradientPair g = base_.exact_gradient(z);
  g.gx += gamma_ * (z.x - anchor_x_);
  return g;
}

GradientPair RegularizedProblem::stochastic_gradient(const PrimalDualPoint& z,
                                                     std::mt19937_64& rng,
                                                     int batch_size) const {
  GradientPair g = base_.stochastic_gradient(z, rng, batch_size);
  g.gx += gamma_ * (z.x - anchor_x_);
  return g;
}

}  // namespace pes
