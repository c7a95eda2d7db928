#pragma once

#include <Eigen/Dense>

#include "dualgp/kernels.hpp"

namespace dualgp {

struct PosteriorSummary {
  Eigen::VectorXd mean;
  // Predictive variances, checked against small negative round-off and
  // clamped to zero.
  Eigen::VectorXd var;
  // Full posterior covariance; left empty above kFullCovLimit query points,
  // where only the diagonal is produced.
  Eigen::MatrixXd cov;

  bool has_full_cov() const { return cov.size() > 0; }
};

// Zero-mean Gaussian-process regressor. Fitting factorizes
// Q = K(X, X) + noise_var * I once (lower Cholesky); predictions and the
// marginal likelihood reuse the factor through triangular solves, never an
// explicit inverse.
class GPModel {
 public:
  static constexpr Eigen::Index kFullCovLimit = 2048;

  // Throws std::invalid_argument on shape errors and NumericalError when the
  // factorization fails even with escalating jitter.
  static GPModel fit(Eigen::MatrixXd X, Eigen::VectorXd y, const KernelSpec& spec,
                     double noise_var);

  // Same inputs, same factor, new targets; only alpha is recomputed.
  GPModel with_targets(Eigen::VectorXd y) const;

  PosteriorSummary posterior(const Eigen::MatrixXd& Xq) const;

  // Predictive means only; skips all covariance work.
  Eigen::VectorXd posterior_mean(const Eigen::MatrixXd& Xq) const;

  double log_marginal_likelihood() const;

  const Eigen::MatrixXd& inputs() const { return X_; }
  const Eigen::VectorXd& targets() const { return y_; }
  const KernelSpec& spec() const { return spec_; }
  double noise_var() const { return noise_var_; }
  const Eigen::MatrixXd& chol() const { return chol_; }
  const Eigen::VectorXd& alpha() const { return alpha_; }
  double applied_jitter() const { return jitter_; }

 private:
  GPModel() = default;

  Eigen::MatrixXd X_;
  Eigen::VectorXd y_;
  double noise_var_ = 0.0;
  KernelSpec spec_;
  Eigen::MatrixXd chol_;   // lower-triangular factor of Q
  Eigen::VectorXd alpha_;  // Q^{-1} y via two triangular solves
  double jitter_ = 0.0;
};

}  // namespace dualgp
