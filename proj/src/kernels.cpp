#include "dualgp/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace dualgp {

namespace {

constexpr double kPi = std::numbers::pi;

void check_finite(double v, const char* name) {
  if (!std::isfinite(v)) {
    throw std::invalid_argument(std::string(name) + " must be finite");
  }
}

void check_same_dim(ConstVecRef x, ConstVecRef y) {
  if (x.size() == 0 || y.size() == 0) {
    throw std::invalid_argument("kernel inputs must be non-empty");
  }
  if (x.size() != y.size()) {
    throw std::invalid_argument("kernel inputs have mismatched dimensions");
  }
}

// Second moments of one network layer for the pair (x, y).
struct MomentTriple {
  double xx, xy, yy;
};

MomentTriple first_layer(ConstVecRef x, ConstVecRef y, const KernelSpec& spec) {
  const double a = spec.sigma_w * spec.sigma_w / static_cast<double>(spec.input_dim);
  const double b = spec.sigma_b * spec.sigma_b;
  return {a * x.squaredNorm() + b, a * x.dot(y) + b, a * y.squaredNorm() + b};
}

void check_network_inputs(ConstVecRef x, ConstVecRef y, const KernelSpec& spec) {
  check_same_dim(x, y);
  if (x.size() != spec.input_dim) {
    throw std::invalid_argument("kernel inputs do not match spec input_dim");
  }
}

}  // namespace

KernelSpec KernelSpec::Rbf(double lengthscale) {
  KernelSpec spec;
  spec.variant = KernelVariant::kRbf;
  spec.lengthscale = lengthscale;
  spec.validate();
  return spec;
}

KernelSpec KernelSpec::Ck(int input_dim, int depth, double sigma_w, double sigma_b) {
  KernelSpec spec;
  spec.variant = KernelVariant::kCk;
  spec.input_dim = input_dim;
  spec.depth = depth;
  spec.sigma_w = sigma_w;
  spec.sigma_b = sigma_b;
  spec.validate();
  return spec;
}

KernelSpec KernelSpec::Ntk(int input_dim, int depth, double sigma_w, double sigma_b) {
  KernelSpec spec = Ck(input_dim, depth, sigma_w, sigma_b);
  spec.variant = KernelVariant::kNtk;
  return spec;
}

void KernelSpec::validate() const {
  check_finite(lengthscale, "lengthscale");
  check_finite(sigma_w, "sigma_w");
  check_finite(sigma_b, "sigma_b");
  if (variant == KernelVariant::kRbf) {
    if (lengthscale <= 0.0) throw std::invalid_argument("lengthscale must be positive");
    return;
  }
  // sigma_w = 0 is a valid degenerate network (the recursion collapses to
  // the bias term); log-space fitting keeps tuned values strictly positive.
  if (sigma_w < 0.0) throw std::invalid_argument("sigma_w must be nonnegative");
  if (sigma_b < 0.0) throw std::invalid_argument("sigma_b must be nonnegative");
  if (depth < 1) throw std::invalid_argument("depth must be at least 1");
  if (input_dim < 1) throw std::invalid_argument("input_dim must be at least 1");
}

double rbf(ConstVecRef x, ConstVecRef y, double lengthscale) {
  check_same_dim(x, y);
  check_finite(lengthscale, "lengthscale");
  if (lengthscale <= 0.0) throw std::invalid_argument("lengthscale must be positive");
  return std::exp(-(x - y).squaredNorm() / (lengthscale * lengthscale));
}

double dual_relu(double kxx, double kxy, double kyy) {
  if (kxx < 0.0 || kyy < 0.0) {
    throw std::invalid_argument("dual_relu needs nonnegative diagonal moments");
  }
  const double prod = kxx * kyy;
  if (prod == 0.0) return 0.0;
  const double norm = std::sqrt(prod);
  const double ratio = std::clamp(kxy / norm, -1.0, 1.0);
  const double c = std::acos(ratio);
  return norm / (2.0 * kPi) * (std::sin(c) + (kPi - c) * std::cos(c));
}

double dual_relu_prime(double kxx, double kxy, double kyy) {
  if (kxx < 0.0 || kyy < 0.0) {
    throw std::invalid_argument("dual_relu_prime needs nonnegative diagonal moments");
  }
  const double prod = kxx * kyy;
  if (prod == 0.0) return 0.25;  // degenerate marginal, c = pi/2
  const double ratio = std::clamp(kxy / std::sqrt(prod), -1.0, 1.0);
  const double c = std::acos(ratio);
  return (kPi - c) / (2.0 * kPi);
}

double ck(ConstVecRef x, ConstVecRef y, const KernelSpec& spec) {
  check_network_inputs(x, y, spec);
  const double sw2 = spec.sigma_w * spec.sigma_w;
  const double b = spec.sigma_b * spec.sigma_b;
  MomentTriple s = first_layer(x, y, spec);
  for (int level = 2; level <= spec.depth; ++level) {
    // At identical points the ReLU moment is exactly half the variance.
    s = {sw2 * 0.5 * s.xx + b, sw2 * dual_relu(s.xx, s.xy, s.yy) + b,
         sw2 * 0.5 * s.yy + b};
  }
  return s.xy;
}

double ntk(ConstVecRef x, ConstVecRef y, const KernelSpec& spec) {
  check_network_inputs(x, y, spec);
  const double sw2 = spec.sigma_w * spec.sigma_w;
  const double b = spec.sigma_b * spec.sigma_b;
  MomentTriple s = first_layer(x, y, spec);
  double theta = s.xy;
  for (int level = 2; level <= spec.depth; ++level) {
    const double vprime = dual_relu_prime(s.xx, s.xy, s.yy);
    s = {sw2 * 0.5 * s.xx + b, sw2 * dual_relu(s.xx, s.xy, s.yy) + b,
         sw2 * 0.5 * s.yy + b};
    theta = s.xy + sw2 * theta * vprime;
  }
  return theta;
}

double eval_kernel(const KernelSpec& spec, ConstVecRef x, ConstVecRef y) {
  switch (spec.variant) {
    case KernelVariant::kRbf:
      return rbf(x, y, spec.lengthscale);
    case KernelVariant::kCk:
      return ck(x, y, spec);
    case KernelVariant::kNtk:
      return ntk(x, y, spec);
  }
  throw std::invalid_argument("unknown kernel variant");
}

// ------- covariance assembly -------

namespace {

void check_points(const Eigen::MatrixXd& X, const char* name) {
  if (X.rows() == 0 || X.cols() == 0) {
    throw std::invalid_argument(std::string(name) + " must contain at least one point");
  }
}

// Validate once up front so the parallel loops below cannot throw.
void check_spec_against(const KernelSpec& spec, const Eigen::MatrixXd& X) {
  spec.validate();
  if (spec.variant != KernelVariant::kRbf && X.cols() != spec.input_dim) {
    throw std::invalid_argument("points do not match spec input_dim");
  }
}

}  // namespace

Eigen::MatrixXd cov_matrix_serial(const KernelSpec& spec, const Eigen::MatrixXd& X) {
  check_points(X, "X");
  check_spec_against(spec, X);
  const Eigen::MatrixXd P = X.transpose();  // contiguous columns for the hot loop
  const Eigen::Index n = P.cols();
  Eigen::MatrixXd K(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      K(i, j) = eval_kernel(spec, P.col(i), P.col(j));
    }
  }
  K.triangularView<Eigen::StrictlyLower>() = K.transpose();
  return K;
}

Eigen::MatrixXd cov_matrix_serial(const KernelSpec& spec, const Eigen::MatrixXd& A,
                                  const Eigen::MatrixXd& B) {
  check_points(A, "A");
  check_points(B, "B");
  if (A.cols() != B.cols()) {
    throw std::invalid_argument("point sets have mismatched dimensions");
  }
  check_spec_against(spec, A);
  const Eigen::MatrixXd Pa = A.transpose();
  const Eigen::MatrixXd Pb = B.transpose();
  Eigen::MatrixXd K(A.rows(), B.rows());
  for (Eigen::Index i = 0; i < K.rows(); ++i) {
    for (Eigen::Index j = 0; j < K.cols(); ++j) {
      K(i, j) = eval_kernel(spec, Pa.col(i), Pb.col(j));
    }
  }
  return K;
}

Eigen::MatrixXd cov_matrix(const KernelSpec& spec, const Eigen::MatrixXd& X) {
  check_points(X, "X");
  check_spec_against(spec, X);
  const Eigen::MatrixXd P = X.transpose();
  const Eigen::Index n = P.cols();
  Eigen::MatrixXd K(n, n);
#pragma omp parallel for schedule(dynamic, 8)
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      K(i, j) = eval_kernel(spec, P.col(i), P.col(j));
    }
  }
  K.triangularView<Eigen::StrictlyLower>() = K.transpose();
  return K;
}

Eigen::MatrixXd cov_matrix(const KernelSpec& spec, const Eigen::MatrixXd& A,
                           const Eigen::MatrixXd& B) {
  check_points(A, "A");
  check_points(B, "B");
  if (A.cols() != B.cols()) {
    throw std::invalid_argument("point sets have mismatched dimensions");
  }
  check_spec_against(spec, A);
  const Eigen::MatrixXd Pa = A.transpose();
  const Eigen::MatrixXd Pb = B.transpose();
  Eigen::MatrixXd K(A.rows(), B.rows());
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < K.rows(); ++i) {
    for (Eigen::Index j = 0; j < K.cols(); ++j) {
      K(i, j) = eval_kernel(spec, Pa.col(i), Pb.col(j));
    }
  }
  return K;
}

}  // namespace dualgp
