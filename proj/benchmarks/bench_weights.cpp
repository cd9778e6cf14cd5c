#include <random>

#include <benchmark/benchmark.h>

#include "frechet/euclidean.hpp"
#include "frechet/regression.hpp"
#include "frechet/weights.hpp"

using namespace frechet;

namespace {

Eigen::MatrixXd gaussian(Eigen::Index n, Eigen::Index p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  Eigen::MatrixXd m(n, p);
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index i = 0; i < n; ++i) m(i, j) = z(rng);
  return m;
}

void BM_GlobalWeights(benchmark::State& state) {
  const PredictorMatrix X(gaussian(state.range(0), state.range(1), 1));
  const Eigen::VectorXd x = Eigen::VectorXd::Constant(state.range(1), 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(global_weights(X, x));
}
BENCHMARK(BM_GlobalWeights)->Args({100, 1})->Args({1000, 1})->Args({1000, 5})->Args({10000, 5});

void BM_LocalWeights(benchmark::State& state) {
  const PredictorMatrix X(gaussian(state.range(0), 1, 2));
  for (auto _ : state) benchmark::DoNotOptimize(local_weights(X, 0.1, 0.3));
}
BENCHMARK(BM_LocalWeights)->Arg(100)->Arg(1000)->Arg(10000);

void BM_NwWeights(benchmark::State& state) {
  const PredictorMatrix X(gaussian(state.range(0), 1, 3));
  for (auto _ : state) benchmark::DoNotOptimize(nw_weights(X, 0.1, 0.3));
}
BENCHMARK(BM_NwWeights)->Arg(100)->Arg(1000)->Arg(10000);

void BM_EuclideanGlobalFit(benchmark::State& state) {
  const auto n = state.range(0);
  const Eigen::MatrixXd Xd = gaussian(n, 3, 4);
  const Eigen::MatrixXd Y = gaussian(n, 5, 5);
  std::vector<Eigen::VectorXd> ys;
  for (Eigen::Index i = 0; i < n; ++i) ys.emplace_back(Y.row(i).transpose());
  const PredictorMatrix X(Xd);
  const Eigen::VectorXd x = Eigen::VectorXd::Zero(3);
  for (auto _ : state)
    benchmark::DoNotOptimize(fit_global(EuclideanSpace{}, X, std::span<const Eigen::VectorXd>(ys), x));
}
BENCHMARK(BM_EuclideanGlobalFit)->Arg(100)->Arg(1000);

}  // namespace
