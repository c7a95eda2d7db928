#include "dualgp/gp.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "dualgp/errors.hpp"

namespace dualgp {

namespace {

// Escalating-jitter Cholesky: factor M as-is first, then with
// jitter0 * 2^k added to the diagonal for k = 0..5.
Eigen::MatrixXd jittered_cholesky(const Eigen::MatrixXd& M, double jitter0,
                                  double* applied) {
  constexpr int kMaxRetries = 6;
  double jitter = 0.0;
  for (int attempt = 0; attempt <= kMaxRetries; ++attempt) {
    Eigen::MatrixXd Q = M;
    if (jitter > 0.0) Q.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(Q);
    if (llt.info() == Eigen::Success) {
      *applied = jitter;
      return llt.matrixL();
    }
    jitter = (attempt == 0) ? jitter0 : 2.0 * jitter;
  }
  std::ostringstream msg;
  msg << "Cholesky factorization failed after " << kMaxRetries
      << " jitter retries (last jitter " << jitter / 2.0 << ")";
  throw NumericalError(msg.str(), jitter / 2.0);
}

}  // namespace

GPModel GPModel::fit(Eigen::MatrixXd X, Eigen::VectorXd y, const KernelSpec& spec,
                     double noise_var) {
  if (X.rows() == 0) throw std::invalid_argument("training set must be non-empty");
  if (X.rows() != y.size()) {
    throw std::invalid_argument("X and y have mismatched lengths");
  }
  if (!std::isfinite(noise_var) || noise_var < 0.0) {
    throw std::invalid_argument("noise_var must be finite and nonnegative");
  }
  if (!y.allFinite() || !X.allFinite()) {
    throw std::invalid_argument("training data must be finite");
  }

  GPModel model;
  model.spec_ = spec;
  Eigen::MatrixXd Q = cov_matrix(spec, X);  // validates spec against X
  if (!Q.allFinite()) {
    // Eigen's LLT can report success on NaN input, so catch overflowed
    // hyperparameters here rather than poisoning the factor.
    throw NumericalError("kernel matrix is not finite");
  }
  const double jitter0 = 1e-8 * Q.diagonal().mean();
  Q.diagonal().array() += noise_var;
  model.chol_ = jittered_cholesky(Q, jitter0, &model.jitter_);
  model.alpha_ = model.chol_.triangularView<Eigen::Lower>().solve(y);
  model.chol_.triangularView<Eigen::Lower>().transpose().solveInPlace(model.alpha_);
  model.X_ = std::move(X);
  model.y_ = std::move(y);
  model.noise_var_ = noise_var;
  return model;
}

GPModel GPModel::with_targets(Eigen::VectorXd y) const {
  if (y.size() != y_.size()) {
    throw std::invalid_argument("replacement targets have the wrong length");
  }
  if (!y.allFinite()) throw std::invalid_argument("targets must be finite");
  GPModel model = *this;
  model.alpha_ = chol_.triangularView<Eigen::Lower>().solve(y);
  chol_.triangularView<Eigen::Lower>().transpose().solveInPlace(model.alpha_);
  model.y_ = std::move(y);
  return model;
}

Eigen::VectorXd GPModel::posterior_mean(const Eigen::MatrixXd& Xq) const {
  if (Xq.rows() == 0) throw std::invalid_argument("query set must be non-empty");
  if (Xq.cols() != X_.cols()) {
    throw std::invalid_argument("query dimension does not match training data");
  }
  return cov_matrix(spec_, Xq, X_) * alpha_;
}

PosteriorSummary GPModel::posterior(const Eigen::MatrixXd& Xq) const {
  if (Xq.rows() == 0) throw std::invalid_argument("query set must be non-empty");
  if (Xq.cols() != X_.cols()) {
    throw std::invalid_argument("query dimension does not match training data");
  }
  const Eigen::Index m = Xq.rows();

  const Eigen::MatrixXd Kstar = cov_matrix(spec_, Xq, X_);  // m x n
  PosteriorSummary out;
  out.mean = Kstar * alpha_;

  // V = L^{-1} K(X, Xq); predictive covariance is K(Xq, Xq) - V^T V.
  Eigen::MatrixXd V = Kstar.transpose();
  chol_.triangularView<Eigen::Lower>().solveInPlace(V);

  Eigen::VectorXd prior_diag(m);
  const Eigen::MatrixXd Pq = Xq.transpose();
  for (Eigen::Index i = 0; i < m; ++i) {
    prior_diag(i) = eval_kernel(spec_, Pq.col(i), Pq.col(i));
  }
  out.var = prior_diag - V.colwise().squaredNorm().transpose();

  if (m <= kFullCovLimit) {
    out.cov = cov_matrix(spec_, Xq) - V.transpose() * V;
    out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
    out.var = out.cov.diagonal();
  }

  // Tiny negative variances are round-off; anything worse is a failure.
  const double scale = std::max(1.0, prior_diag.maxCoeff());
  for (Eigen::Index i = 0; i < m; ++i) {
    if (out.var(i) < -1e-10 * scale) {
      throw NumericalError("posterior variance went negative beyond round-off");
    }
    if (out.var(i) < 0.0) out.var(i) = 0.0;
  }
  return out;
}

double GPModel::log_marginal_likelihood() const {
  const double n = static_cast<double>(y_.size());
  return -0.5 * y_.dot(alpha_) - chol_.diagonal().array().log().sum() -
         0.5 * n * std::log(2.0 * std::numbers::pi);
}

}  // namespace dualgp
