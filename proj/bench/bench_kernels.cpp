// Micro-benchmarks comparing the OpenMP covariance assembly against the
// serial reference loops, plus the end-to-end fit/predict path.
//
// Build requires google-benchmark (target is skipped when it is absent):
//   cmake --build build --target bench_kernels && ./build/bench_kernels

#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "dualgp/gp.hpp"
#include "dualgp/kernels.hpp"
#include "dualgp/rng.hpp"

namespace {

using dualgp::KernelSpec;
using dualgp::KernelVariant;

Eigen::MatrixXd random_inputs(int n, int dim, std::uint64_t seed) {
  dualgp::Rng rng(seed);
  Eigen::MatrixXd X(n, dim);
  for (Eigen::Index i = 0; i < X.size(); ++i) X(i) = rng.uniform(-2.0, 2.0);
  return X;
}

KernelSpec spec_for(int variant) {
  switch (variant) {
    case 0: return KernelSpec::Rbf(0.9);
    case 1: return KernelSpec::Ck(3, 3, 1.3, 0.2);
    default: return KernelSpec::Ntk(3, 3, 1.3, 0.2);
  }
}

const char* variant_name(int variant) {
  switch (variant) {
    case 0: return "rbf";
    case 1: return "ck";
    default: return "ntk";
  }
}

void bench_cov_parallel(benchmark::State& state) {
  const KernelSpec spec = spec_for(static_cast<int>(state.range(0)));
  const int n = static_cast<int>(state.range(1));
  const Eigen::MatrixXd X = random_inputs(n, 3, 7);
  for (auto _ : state) {
    Eigen::MatrixXd K = dualgp::cov_matrix(spec, X);
    benchmark::DoNotOptimize(K.data());
  }
  state.SetLabel(variant_name(static_cast<int>(state.range(0))));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n) * n);
}

void bench_cov_serial(benchmark::State& state) {
  const KernelSpec spec = spec_for(static_cast<int>(state.range(0)));
  const int n = static_cast<int>(state.range(1));
  const Eigen::MatrixXd X = random_inputs(n, 3, 7);
  for (auto _ : state) {
    Eigen::MatrixXd K = dualgp::cov_matrix_serial(spec, X);
    benchmark::DoNotOptimize(K.data());
  }
  state.SetLabel(variant_name(static_cast<int>(state.range(0))));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n) * n);
}

void bench_cross_cov_parallel(benchmark::State& state) {
  const KernelSpec spec = spec_for(static_cast<int>(state.range(0)));
  const int n = static_cast<int>(state.range(1));
  const Eigen::MatrixXd A = random_inputs(4 * n, 3, 11);
  const Eigen::MatrixXd B = random_inputs(n, 3, 13);
  for (auto _ : state) {
    Eigen::MatrixXd K = dualgp::cov_matrix(spec, A, B);
    benchmark::DoNotOptimize(K.data());
  }
  state.SetLabel(variant_name(static_cast<int>(state.range(0))));
  state.SetItemsProcessed(state.iterations() * 4 * static_cast<std::int64_t>(n) * n);
}

void bench_cross_cov_serial(benchmark::State& state) {
  const KernelSpec spec = spec_for(static_cast<int>(state.range(0)));
  const int n = static_cast<int>(state.range(1));
  const Eigen::MatrixXd A = random_inputs(4 * n, 3, 11);
  const Eigen::MatrixXd B = random_inputs(n, 3, 13);
  for (auto _ : state) {
    Eigen::MatrixXd K = dualgp::cov_matrix_serial(spec, A, B);
    benchmark::DoNotOptimize(K.data());
  }
  state.SetLabel(variant_name(static_cast<int>(state.range(0))));
  state.SetItemsProcessed(state.iterations() * 4 * static_cast<std::int64_t>(n) * n);
}

void bench_fit(benchmark::State& state) {
  const KernelSpec spec = spec_for(static_cast<int>(state.range(0)));
  const int n = static_cast<int>(state.range(1));
  const Eigen::MatrixXd X = random_inputs(n, 3, 17);
  dualgp::Rng rng(19);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) y(i) = rng.normal();
  for (auto _ : state) {
    dualgp::GPModel gp = dualgp::GPModel::fit(X, y, spec, 1e-3);
    benchmark::DoNotOptimize(gp.alpha().data());
  }
  state.SetLabel(variant_name(static_cast<int>(state.range(0))));
}

void bench_posterior_mean(benchmark::State& state) {
  const KernelSpec spec = spec_for(static_cast<int>(state.range(0)));
  const int n = static_cast<int>(state.range(1));
  const Eigen::MatrixXd X = random_inputs(n, 3, 17);
  dualgp::Rng rng(19);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) y(i) = rng.normal();
  const dualgp::GPModel gp = dualgp::GPModel::fit(X, y, spec, 1e-3);
  const Eigen::MatrixXd Q = random_inputs(4096, 3, 23);
  for (auto _ : state) {
    Eigen::VectorXd mu = gp.posterior_mean(Q);
    benchmark::DoNotOptimize(mu.data());
  }
  state.SetLabel(variant_name(static_cast<int>(state.range(0))));
  state.SetItemsProcessed(state.iterations() * Q.rows() * n);
}

void grid(benchmark::internal::Benchmark* b) {
  for (int variant = 0; variant < 3; ++variant)
    for (int n : {128, 512}) b->Args({variant, n});
}

BENCHMARK(bench_cov_parallel)->Apply(grid)->Unit(benchmark::kMicrosecond);
BENCHMARK(bench_cov_serial)->Apply(grid)->Unit(benchmark::kMicrosecond);
BENCHMARK(bench_cross_cov_parallel)->Apply(grid)->Unit(benchmark::kMicrosecond);
BENCHMARK(bench_cross_cov_serial)->Apply(grid)->Unit(benchmark::kMicrosecond);
BENCHMARK(bench_fit)->Apply(grid)->Unit(benchmark::kMicrosecond);
BENCHMARK(bench_posterior_mean)->Apply(grid)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
