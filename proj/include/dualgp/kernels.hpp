#pragma once

#include <Eigen/Dense>

namespace dualgp {

// Accepts vectors, matrix rows and matrix columns without copying.
using ConstVecRef = Eigen::Ref<const Eigen::VectorXd, 0, Eigen::InnerStride<>>;

enum class KernelVariant { kRbf, kCk, kNtk };

// Covariance function selector. RBF reads `lengthscale` only; the two
// network kernels (conjugate kernel and neural tangent kernel of an
// infinitely wide fully-connected ReLU network) read sigma_w, sigma_b,
// depth and input_dim.
struct KernelSpec {
  KernelVariant variant = KernelVariant::kRbf;
  double lengthscale = 1.0;
  double sigma_w = 1.0;
  double sigma_b = 0.1;
  int depth = 3;
  int input_dim = 1;

  static KernelSpec Rbf(double lengthscale);
  static KernelSpec Ck(int input_dim, int depth, double sigma_w, double sigma_b);
  static KernelSpec Ntk(int input_dim, int depth, double sigma_w, double sigma_b);

  // Throws std::invalid_argument on non-finite or out-of-range fields.
  void validate() const;
};

// exp(-|x - y|^2 / l^2); note the plain l^2 in the denominator.
double rbf(ConstVecRef x, ConstVecRef y, double lengthscale);

// Expected ReLU products under a centered bivariate Gaussian with second
// moments (kxx, kxy, kyy):
//   dual_relu       = E[relu(f) relu(f')]   = sqrt(kxx kyy)/(2 pi) * (sin c + (pi - c) cos c)
//   dual_relu_prime = E[relu'(f) relu'(f')] = (pi - c) / (2 pi)
// with c = arccos(kxy / sqrt(kxx kyy)), the cosine ratio clamped to [-1, 1].
// A zero-variance marginal degenerates to c = pi/2 (dual_relu 0, prime 1/4).
double dual_relu(double kxx, double kxy, double kyy);
double dual_relu_prime(double kxx, double kxy, double kyy);

// Depth-`depth` conjugate kernel / neural tangent kernel values. Both track
// the moment triple (S(x,x), S(x,y), S(y,y)) through the layers so a pair
// costs O(depth) scalar work.
double ck(ConstVecRef x, ConstVecRef y, const KernelSpec& spec);
double ntk(ConstVecRef x, ConstVecRef y, const KernelSpec& spec);

double eval_kernel(const KernelSpec& spec, ConstVecRef x, ConstVecRef y);

// Covariance assembly over row-major point sets (one point per row). The
// one-argument overload fills the upper triangle and mirrors it, so the
// result is exactly symmetric. The unsuffixed versions parallelize over rows
// with OpenMP; the *_serial twins are the plain loops kept as a reference,
// and both produce bit-identical entries.
Eigen::MatrixXd cov_matrix(const KernelSpec& spec, const Eigen::MatrixXd& X);
Eigen::MatrixXd cov_matrix(const KernelSpec& spec, const Eigen::MatrixXd& A,
                           const Eigen::MatrixXd& B);
Eigen::MatrixXd cov_matrix_serial(const KernelSpec& spec, const Eigen::MatrixXd& X);
Eigen::MatrixXd cov_matrix_serial(const KernelSpec& spec, const Eigen::MatrixXd& A,
                                  const Eigen::MatrixXd& B);

}  // namespace dualgp
