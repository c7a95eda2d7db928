#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "dualgp/kernels.hpp"
#include "dualgp/rng.hpp"

using namespace dualgp;

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::VectorXd vec1(double a) {
  Eigen::VectorXd v(1);
  v << a;
  return v;
}

Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

// A random well-conditioned PSD 2x2 second-moment matrix (kxx, kxy, kyy).
struct Moments {
  double xx, xy, yy;
};

Moments random_moments(Rng& rng) {
  const double a = rng.uniform(0.2, 1.5);
  const double b = rng.uniform(-1.0, 1.0);
  const double c = rng.uniform(0.2, 1.5);
  // K = A A^T with A = [[a, 0], [b, c]] is PSD by construction.
  return {a * a, a * b, b * b + c * c};
}

// Monte-Carlo estimate of E[g(u) g(v)] for (u, v) ~ N(0, K), with standard
// error, via the Cholesky factor of K.
struct McEstimate {
  double mean, se;
};

template <typename G>
McEstimate mc_pair_expectation(const Moments& m, G&& g, int n, Rng& rng) {
  const double l11 = std::sqrt(m.xx);
  const double l21 = l11 > 0.0 ? m.xy / l11 : 0.0;
  const double l22 = std::sqrt(std::max(m.yy - l21 * l21, 0.0));
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z1 = rng.normal();
    const double z2 = rng.normal();
    const double u = l11 * z1;
    const double v = l21 * z1 + l22 * z2;
    const double p = g(u) * g(v);
    sum += p;
    sum_sq += p * p;
  }
  const double mean = sum / n;
  const double var = std::max(sum_sq / n - mean * mean, 0.0);
  return {mean, std::sqrt(var / n)};
}

}  // namespace

TEST_CASE("rbf closed-form values") {
  CHECK(rbf(vec2(0.3, -1.2), vec2(0.3, -1.2), 0.7) == doctest::Approx(1.0));
  // distance equal to the lengthscale gives e^-1
  CHECK(rbf(vec1(0.0), vec1(1.5), 1.5) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(rbf(vec1(0.0), vec1(2.0), 1.0) ==
        doctest::Approx(0.01831563888873418).epsilon(1e-12));
  // the denominator is l^2, not 2 l^2
  CHECK(rbf(vec1(0.0), vec1(1.0), 2.0) ==
        doctest::Approx(std::exp(-0.25)).epsilon(1e-12));
}

TEST_CASE("rbf symmetry and range") {
  Rng rng(11);
  for (int i = 0; i < 20; ++i) {
    const auto x = vec2(rng.uniform(-3, 3), rng.uniform(-3, 3));
    const auto y = vec2(rng.uniform(-3, 3), rng.uniform(-3, 3));
    const double l = rng.uniform(0.2, 3.0);
    const double k1 = rbf(x, y, l);
    CHECK(k1 == rbf(y, x, l));
    CHECK(k1 > 0.0);
    CHECK(k1 <= 1.0);
  }
}

TEST_CASE("rbf argument errors") {
  CHECK_THROWS_AS(rbf(vec1(0.0), vec2(0.0, 1.0), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(rbf(vec1(0.0), vec1(1.0), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(rbf(vec1(0.0), vec1(1.0), -1.0), std::invalid_argument);
}

TEST_CASE("dual_relu closed-form values") {
  // identical points: exactly half the variance
  CHECK(dual_relu(1.0, 1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
  // orthogonal: 1/(2 pi)
  CHECK(dual_relu(1.0, 0.0, 1.0) ==
        doctest::Approx(0.15915494309189535).epsilon(1e-12));
  // antipodal: one of the pair is always negative
  CHECK(dual_relu(1.0, -1.0, 1.0) == doctest::Approx(0.0));
  CHECK(dual_relu(4.0, -2.0, 1.0) == doctest::Approx(0.0));
}

TEST_CASE("dual_relu identical points give half the variance") {
  Rng rng(12);
  for (int i = 0; i < 20; ++i) {
    const double k = rng.uniform(0.01, 10.0);
    CHECK(dual_relu(k, k, k) == doctest::Approx(0.5 * k).epsilon(1e-12));
    CHECK(dual_relu_prime(k, k, k) == doctest::Approx(0.5).epsilon(1e-14));
  }
}

TEST_CASE("dual_relu_prime closed-form values") {
  CHECK(dual_relu_prime(1.0, 1.0, 1.0) == doctest::Approx(0.5));
  CHECK(dual_relu_prime(1.0, 0.0, 1.0) == doctest::Approx(0.25));
  CHECK(dual_relu_prime(1.0, -1.0, 1.0) == doctest::Approx(0.0));
}

TEST_CASE("dual_relu degenerate and error branches") {
  // zero-variance marginal: product expectation vanishes, gate fixed at 1/4
  CHECK(dual_relu(0.0, 0.0, 1.0) == 0.0);
  CHECK(dual_relu(1.0, 0.0, 0.0) == 0.0);
  CHECK(dual_relu_prime(0.0, 0.0, 1.0) == doctest::Approx(0.25));
  CHECK_THROWS_AS(dual_relu(-1.0, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(dual_relu(1.0, 0.0, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(dual_relu_prime(-1.0, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("dual_relu prime bounded in [0, 1/2]") {
  Rng rng(13);
  for (int i = 0; i < 50; ++i) {
    const Moments m = random_moments(rng);
    const double p = dual_relu_prime(m.xx, m.xy, m.yy);
    CHECK(p >= 0.0);
    CHECK(p <= 0.5);
  }
}

TEST_CASE("dual activations agree with Monte-Carlo expectations") {
  // Cheap version of the acceptance-suite oracle: fewer cases and samples.
  Rng rng(14);
  const int n = 200000;
  for (int i = 0; i < 8; ++i) {
    const Moments m = random_moments(rng);
    const auto relu = [](double t) { return t > 0.0 ? t : 0.0; };
    const auto gate = [](double t) { return t > 0.0 ? 1.0 : 0.0; };
    const auto est_v = mc_pair_expectation(m, relu, n, rng);
    const auto est_g = mc_pair_expectation(m, gate, n, rng);
    CHECK(std::abs(dual_relu(m.xx, m.xy, m.yy) - est_v.mean) <=
          3.0 * est_v.se + 1e-12);
    CHECK(std::abs(dual_relu_prime(m.xx, m.xy, m.yy) - est_g.mean) <=
          3.0 * est_g.se + 1e-12);
  }
}

TEST_CASE("ck closed-form values") {
  // depth 1 is the affine input layer alone
  CHECK(ck(vec1(2.0), vec1(3.0), KernelSpec::Ck(1, 1, 1.0, 1.0)) ==
        doctest::Approx(7.0).epsilon(1e-14));
  // depth 2 at identical points halves the first-layer variance
  CHECK(ck(vec1(2.0), vec1(2.0), KernelSpec::Ck(1, 2, 1.0, 1.0)) ==
        doctest::Approx(3.5).epsilon(1e-14));
}

TEST_CASE("ck collapses to the bias term when sigma_w is zero") {
  const KernelSpec spec = KernelSpec::Ck(2, 3, 0.0, 0.7);
  Rng rng(15);
  for (int i = 0; i < 10; ++i) {
    const auto x = vec2(rng.uniform(-2, 2), rng.uniform(-2, 2));
    const auto y = vec2(rng.uniform(-2, 2), rng.uniform(-2, 2));
    CHECK(ck(x, y, spec) == doctest::Approx(0.49).epsilon(1e-12));
  }
}

TEST_CASE("ntk depth 1 equals ck depth 1") {
  Rng rng(16);
  for (int i = 0; i < 10; ++i) {
    const auto x = vec2(rng.uniform(-2, 2), rng.uniform(-2, 2));
    const auto y = vec2(rng.uniform(-2, 2), rng.uniform(-2, 2));
    const KernelSpec c = KernelSpec::Ck(2, 1, 1.3, 0.4);
    const KernelSpec t = KernelSpec::Ntk(2, 1, 1.3, 0.4);
    CHECK(ntk(x, y, t) == ck(x, y, c));
  }
}

TEST_CASE("ntk closed-form value at depth 2") {
  CHECK(ntk(vec1(2.0), vec1(2.0), KernelSpec::Ntk(1, 2, 1.0, 1.0)) ==
        doctest::Approx(6.0).epsilon(1e-14));
}

TEST_CASE("ntk diagonal dominates ck diagonal") {
  Rng rng(17);
  for (int depth = 1; depth <= 4; ++depth) {
    for (int i = 0; i < 10; ++i) {
      const auto x = vec2(rng.uniform(-2, 2), rng.uniform(-2, 2));
      const KernelSpec c = KernelSpec::Ck(2, depth, 1.1, 0.3);
      const KernelSpec t = KernelSpec::Ntk(2, depth, 1.1, 0.3);
      CHECK(ntk(x, x, t) >= ck(x, x, c));
    }
  }
}

TEST_CASE("network kernels are symmetric") {
  Rng rng(18);
  const KernelSpec c = KernelSpec::Ck(2, 3, 1.2, 0.2);
  const KernelSpec t = KernelSpec::Ntk(2, 3, 1.2, 0.2);
  for (int i = 0; i < 20; ++i) {
    const auto x = vec2(rng.uniform(-2, 2), rng.uniform(-2, 2));
    const auto y = vec2(rng.uniform(-2, 2), rng.uniform(-2, 2));
    CHECK(ck(x, y, c) == ck(y, x, c));
    CHECK(ntk(x, y, t) == ntk(y, x, t));
  }
}

TEST_CASE("network kernels are nonstationary") {
  // equal pairwise distances, unequal kernel values
  const auto a = vec1(0.0), b = vec1(1.0), c = vec1(2.0);
  const KernelSpec ck_spec = KernelSpec::Ck(1, 3, 1.0, 0.1);
  const KernelSpec ntk_spec = KernelSpec::Ntk(1, 3, 1.0, 0.1);
  CHECK(ck(a, b, ck_spec) != ck(b, c, ck_spec));
  CHECK(ntk(a, b, ntk_spec) != ntk(b, c, ntk_spec));
}

TEST_CASE("network kernels are rotation-invariant on the unit circle with zero bias") {
  // with sigma_b = 0 the kernel depends only on the inner product, so a
  // joint rotation of unit inputs leaves it unchanged
  const KernelSpec ck_spec = KernelSpec::Ck(2, 3, 1.4, 0.0);
  const KernelSpec ntk_spec = KernelSpec::Ntk(2, 3, 1.4, 0.0);
  Rng rng(19);
  for (int i = 0; i < 10; ++i) {
    const double theta = rng.uniform(0.0, 2.0 * kPi);
    const double phi = rng.uniform(0.0, 2.0 * kPi);
    const auto x0 = vec2(1.0, 0.0);
    const auto y0 = vec2(std::cos(theta), std::sin(theta));
    const auto x1 = vec2(std::cos(phi), std::sin(phi));
    const auto y1 = vec2(std::cos(theta + phi), std::sin(theta + phi));
    CHECK(ck(x0, y0, ck_spec) == doctest::Approx(ck(x1, y1, ck_spec)).epsilon(1e-12));
    CHECK(ntk(x0, y0, ntk_spec) ==
          doctest::Approx(ntk(x1, y1, ntk_spec)).epsilon(1e-12));
  }
}

TEST_CASE("kernel spec validation") {
  CHECK_THROWS_AS(KernelSpec::Rbf(0.0), std::invalid_argument);
  CHECK_THROWS_AS(KernelSpec::Rbf(-2.0), std::invalid_argument);
  CHECK_THROWS_AS(KernelSpec::Ck(1, 0, 1.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(KernelSpec::Ck(0, 1, 1.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(KernelSpec::Ck(1, 1, -1.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(KernelSpec::Ck(1, 1, 1.0, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(KernelSpec::Rbf(std::numeric_limits<double>::quiet_NaN()),
                  std::invalid_argument);
  CHECK_NOTHROW(KernelSpec::Ck(3, 1, 0.0, 0.0));
}

TEST_CASE("network kernel dimension checks") {
  const KernelSpec spec = KernelSpec::Ck(2, 2, 1.0, 0.1);
  CHECK_THROWS_AS(ck(vec1(1.0), vec1(2.0), spec), std::invalid_argument);
  CHECK_THROWS_AS(ck(vec2(1.0, 0.0), vec1(2.0), spec), std::invalid_argument);
}

TEST_CASE("cov_matrix single point") {
  Eigen::MatrixXd X(1, 2);
  X << 0.4, -0.7;
  const Eigen::MatrixXd K = cov_matrix(KernelSpec::Rbf(1.0), X);
  REQUIRE(K.rows() == 1);
  REQUIRE(K.cols() == 1);
  CHECK(K(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("cov_matrix self is exactly symmetric with unit rbf diagonal") {
  Rng rng(20);
  Eigen::MatrixXd X(17, 3);
  for (Eigen::Index i = 0; i < X.size(); ++i) X(i) = rng.uniform(-2, 2);
  const Eigen::MatrixXd K = cov_matrix(KernelSpec::Rbf(0.9), X);
  CHECK(K == K.transpose());
  for (Eigen::Index i = 0; i < K.rows(); ++i) CHECK(K(i, i) == 1.0);
}

TEST_CASE("cov_matrix matches scalar kernel calls exactly") {
  Rng rng(21);
  Eigen::MatrixXd X(3, 2);
  for (Eigen::Index i = 0; i < X.size(); ++i) X(i) = rng.uniform(-2, 2);
  const KernelSpec spec = KernelSpec::Ck(2, 3, 1.0, 0.1);
  const Eigen::MatrixXd K = cov_matrix(spec, X);
  for (Eigen::Index i = 0; i < 3; ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) {
      const Eigen::VectorXd xi = X.row(i).transpose();
      const Eigen::VectorXd xj = X.row(j).transpose();
      // the assembly evaluates the same scalar recursion: equal to the bit
      if (j >= i) {
        CHECK(K(i, j) == ck(xi, xj, spec));
      } else {
        CHECK(K(i, j) == ck(xj, xi, spec));
      }
    }
  }
}

TEST_CASE("cov_matrix cross block against scalar calls") {
  Rng rng(22);
  Eigen::MatrixXd A(4, 2), B(5, 2);
  for (Eigen::Index i = 0; i < A.size(); ++i) A(i) = rng.uniform(-2, 2);
  for (Eigen::Index i = 0; i < B.size(); ++i) B(i) = rng.uniform(-2, 2);
  const KernelSpec spec = KernelSpec::Ntk(2, 3, 1.2, 0.3);
  const Eigen::MatrixXd K = cov_matrix(spec, A, B);
  REQUIRE(K.rows() == 4);
  REQUIRE(K.cols() == 5);
  for (Eigen::Index i = 0; i < 4; ++i) {
    for (Eigen::Index j = 0; j < 5; ++j) {
      CHECK(K(i, j) == ntk(A.row(i).transpose(), B.row(j).transpose(), spec));
    }
  }
}

TEST_CASE("parallel and serial covariance assembly agree bitwise") {
  Rng rng(23);
  Eigen::MatrixXd X(31, 3), Q(12, 3);
  for (Eigen::Index i = 0; i < X.size(); ++i) X(i) = rng.uniform(-2, 2);
  for (Eigen::Index i = 0; i < Q.size(); ++i) Q(i) = rng.uniform(-2, 2);
  for (const KernelSpec& spec :
       {KernelSpec::Rbf(0.8), KernelSpec::Ck(3, 3, 1.0, 0.1),
        KernelSpec::Ntk(3, 3, 1.0, 0.1)}) {
    CHECK(cov_matrix(spec, X) == cov_matrix_serial(spec, X));
    CHECK(cov_matrix(spec, Q, X) == cov_matrix_serial(spec, Q, X));
  }
}

TEST_CASE("self covariance matrices are positive semidefinite") {
  Rng rng(24);
  for (const KernelSpec& spec :
       {KernelSpec::Rbf(1.1), KernelSpec::Ck(2, 3, 1.0, 0.1),
        KernelSpec::Ntk(2, 3, 1.0, 0.1)}) {
    for (int rep = 0; rep < 5; ++rep) {
      const int n = 10 + static_cast<int>(rng.uniform(0.0, 40.0));
      Eigen::MatrixXd X(n, 2);
      for (Eigen::Index i = 0; i < X.size(); ++i) X(i) = rng.uniform(-2, 2);
      const Eigen::MatrixXd K = cov_matrix(spec, X);
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(K);
      CHECK(eig.eigenvalues().minCoeff() >= -1e-8 * K.trace());
    }
  }
}

TEST_CASE("cov_matrix rejects empty and mismatched inputs") {
  const Eigen::MatrixXd empty(0, 2);
  Eigen::MatrixXd X(2, 2);
  X << 0, 0, 1, 1;
  Eigen::MatrixXd Y(2, 3);
  Y << 0, 0, 0, 1, 1, 1;
  CHECK_THROWS_AS(cov_matrix(KernelSpec::Rbf(1.0), empty), std::invalid_argument);
  CHECK_THROWS_AS(cov_matrix(KernelSpec::Rbf(1.0), X, empty), std::invalid_argument);
  CHECK_THROWS_AS(cov_matrix(KernelSpec::Rbf(1.0), X, Y), std::invalid_argument);
  // network spec must match the point dimension
  CHECK_THROWS_AS(cov_matrix(KernelSpec::Ck(3, 2, 1.0, 0.1), X),
                  std::invalid_argument);
}
