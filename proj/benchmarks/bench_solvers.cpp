#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "frechet/correlation.hpp"
#include "frechet/sphere.hpp"
#include "frechet/wasserstein.hpp"
#include "frechet/weights.hpp"

using namespace frechet;

namespace {

void BM_IsotonicProjection(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> z(0.0, 1.0);
  const auto m = state.range(0);
  Eigen::VectorXd g(m);
  // A noisy increasing sequence: the typical input after a signed weighted average.
  for (Eigen::Index j = 0; j < m; ++j) g[j] = 3.0 * static_cast<double>(j) / static_cast<double>(m) + 0.3 * z(rng);
  for (auto _ : state) benchmark::DoNotOptimize(isotonic_projection(g));
  state.SetComplexityN(m);
}
BENCHMARK(BM_IsotonicProjection)->RangeMultiplier(10)->Range(100, 100000)->Complexity(benchmark::oN);

void BM_NearestCorrelation(benchmark::State& state) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto r = state.range(0);
  Eigen::MatrixXd b(r, r);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) b(i, j) = b(j, i) = i == j ? 1.0 : u(rng);
  const SymMatrix sym(b);
  for (auto _ : state) benchmark::DoNotOptimize(nearest_correlation(sym));
}
BENCHMARK(BM_NearestCorrelation)->Arg(3)->Arg(5)->Arg(10)->Arg(20);

void BM_SphereMean(benchmark::State& state) {
  const auto n = static_cast<int>(state.range(0));
  const auto sample = simulate_sphere(n, 0.04, 3);
  const PredictorMatrix X{Eigen::MatrixXd(sample.x)};
  const WeightVector w = local_weights(X, 0.5, 0.2);
  for (auto _ : state) benchmark::DoNotOptimize(weighted_frechet_mean_sphere(w, sample.y));
}
BENCHMARK(BM_SphereMean)->Arg(50)->Arg(200)->Arg(1000);

void BM_WassersteinFit(benchmark::State& state) {
  const auto n = static_cast<int>(state.range(0));
  const QuantileGrid grid;
  const auto sample = simulate_setting2(n, DistributionModel::setting2(), grid, 4);
  const PredictorMatrix X{Eigen::MatrixXd(sample.x)};
  const Eigen::VectorXd x = Eigen::VectorXd::Constant(1, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(fit_distribution(global_weights(X, x), sample.y));
}
BENCHMARK(BM_WassersteinFit)->Arg(50)->Arg(200);

}  // namespace

BENCHMARK_MAIN();
