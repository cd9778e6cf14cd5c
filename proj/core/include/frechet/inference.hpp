#ifndef FRECHET_INFERENCE_HPP
#define FRECHET_INFERENCE_HPP

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <sstream>
#include <vector>

#include <Eigen/Core>

#include "frechet/parallel.hpp"
#include "frechet/random.hpp"
#include "frechet/regression.hpp"

namespace frechet {

struct FitReport {
  double r2 = 0.0;
  double r2_adjusted = 0.0;
  Eigen::Index n = 0;
  Eigen::Index q = 0;
  /// n^{-1} sum_i d^2(Y_i, sample Frechet mean).
  double frechet_variance = 0.0;
};

struct PermutationResult {
  double observed_stat = 0.0;
  std::vector<double> null_stats;
  double p_value = 1.0;
};

struct SubsetScore {
  std::vector<int> columns;
  FitReport report;
};

struct ModelSelection {
  std::vector<int> columns;
  FitReport report;
  /// Every nonempty subset in enumeration order.
  std::vector<SubsetScore> candidates;
};

/// R^2 - (1 - R^2) q / (n - q - 1).
double adjusted_r2(double r2, Eigen::Index n, Eigen::Index q);

/// (1 + #{null >= observed}) / (B + 1).
double permutation_p_value(double observed, std::span<const double> null_stats);

/// Balanced fold assignment of a seeded shuffle: the first n mod k folds get
/// one extra observation. Returns the observation indices of each fold.
std::vector<std::vector<Eigen::Index>> make_folds(Eigen::Index n, int k, std::uint64_t seed);

/// Seeded random permutation of 0..n-1.
std::vector<Eigen::Index> random_permutation(Eigen::Index n, std::uint64_t seed);

/// Fitter: callable (space, X, ys, x) -> Object.
template <class F, class S>
concept FitterFor = ObjectSpace<S> && requires(const F& f, const S& s, const PredictorMatrix& X,
                                               std::span<const typename S::Object> ys,
                                               const Eigen::VectorXd& x) {
  { f(s, X, ys, x) } -> std::convertible_to<typename S::Object>;
};

/// Frechet coefficient of determination
///   1 - sum_i d^2(Y_i, fit(X_i)) / sum_i d^2(Y_i, sample Frechet mean).
template <ObjectSpace S, FitterFor<S> F>
FitReport frechet_r2(const S& space, const PredictorMatrix& X, std::span<const typename S::Object> ys,
                     const F& fitter) {
  detail::check_sample(X, ys.size());
  if (X.n() < 3) throw Error(ErrorCode::ShapeMismatch, "R^2 needs at least 3 observations");

  const auto center = space.weighted_mean(uniform_weights(X.n()), ys);
  double total = 0.0;
  double residual = 0.0;
  for (Eigen::Index i = 0; i < X.n(); ++i) {
    const auto& y = ys[static_cast<std::size_t>(i)];
    const double d0 = space.distance(y, center);
    total += d0 * d0;
    const Eigen::VectorXd xi = X.row(i).transpose();
    const double d1 = space.distance(y, fitter(space, X, ys, xi));
    residual += d1 * d1;
  }
  const auto n = static_cast<double>(X.n());
  if (!(total / n > 1e-12)) {
    std::ostringstream msg;
    msg << "Frechet variance " << total / n << " is zero; responses are constant";
    throw Error(ErrorCode::DegenerateResponse, msg.str());
  }
  FitReport report;
  report.n = X.n();
  report.q = X.p();
  report.frechet_variance = total / n;
  report.r2 = 1.0 - residual / total;
  report.r2_adjusted = adjusted_r2(report.r2, report.n, report.q);
  return report;
}

/// Permutation test of no effect using R^2 as the statistic. Permutation b
/// shuffles the predictor rows with seed derive_seed(seed, 1, b); the result
/// does not depend on the worker count.
template <ObjectSpace S, FitterFor<S> F>
PermutationResult permutation_test(const S& space, const PredictorMatrix& X,
                                   std::span<const typename S::Object> ys, const F& fitter, int B,
                                   std::uint64_t seed) {
  if (B < 99) throw Error(ErrorCode::ParameterDomain, "permutation test needs B >= 99");
  PermutationResult result;
  result.observed_stat = frechet_r2(space, X, ys, fitter).r2;
  result.null_stats.assign(static_cast<std::size_t>(B), 0.0);
  parallel_for(static_cast<std::size_t>(B), [&](std::size_t b) {
    const auto order = random_permutation(X.n(), derive_seed(seed, 1, b));
    const PredictorMatrix permuted = X.take_rows(order);
    result.null_stats[b] = frechet_r2(space, permuted, ys, fitter).r2;
  });
  result.p_value = permutation_p_value(result.observed_stat, result.null_stats);
  return result;
}

/// Exhaustive best-subset selection by adjusted R^2: first the size q*
/// whose best subset scores highest (smaller q wins ties), then the best
/// subset of that size (lexicographically first wins ties).
template <ObjectSpace S, FitterFor<S> F>
ModelSelection select_model(const S& space, const PredictorMatrix& X,
                            std::span<const typename S::Object> ys, const F& fitter) {
  const auto p = static_cast<int>(X.p());
  if (p > 15) throw Error(ErrorCode::ParameterDomain, "exhaustive subset search is limited to p <= 15");

  std::vector<std::vector<int>> subsets;
  for (unsigned mask = 1; mask < (1u << p); ++mask) {
    std::vector<int> cols;
    for (int j = 0; j < p; ++j)
      if (mask & (1u << j)) cols.push_back(j);
    subsets.push_back(std::move(cols));
  }
  std::sort(subsets.begin(), subsets.end(), [](const auto& a, const auto& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });

  ModelSelection out;
  out.candidates.resize(subsets.size());
  parallel_for(subsets.size(), [&](std::size_t s) {
    out.candidates[s] = {subsets[s], frechet_r2(space, X.select(subsets[s]), ys, fitter)};
  });

  // Candidates are ordered by size then lexicographically, so a strict '>'
  // implements both tie-breaks of the two-stage rule.
  const SubsetScore* best = nullptr;
  for (const auto& c : out.candidates)
    if (!best || c.report.r2_adjusted > best->report.r2_adjusted) best = &c;
  out.columns = best->columns;
  out.report = best->report;
  return out;
}

/// Repeated k-fold cross-validated mean squared prediction error
///   mean over repeats of mean over folds of mean_{i in fold} d^2(Y_i, fit_{-fold}(X_i)).
/// Repeat r uses fold seed derive_seed(seed, 2, r).
template <ObjectSpace S, FitterFor<S> F>
double cv_prediction_error(const S& space, const PredictorMatrix& X,
                           std::span<const typename S::Object> ys, const F& fitter, int k,
                           int repeats, std::uint64_t seed) {
  detail::check_sample(X, ys.size());
  if (k < 2 || k > X.n()) throw Error(ErrorCode::ParameterDomain, "cross-validation needs 2 <= k <= n");
  if (repeats < 1) throw Error(ErrorCode::ParameterDomain, "repeats must be positive");

  using Object = typename S::Object;
  const auto folds_per = static_cast<std::size_t>(k);
  std::vector<std::vector<std::vector<Eigen::Index>>> plan(static_cast<std::size_t>(repeats));
  for (int r = 0; r < repeats; ++r)
    plan[static_cast<std::size_t>(r)] = make_folds(X.n(), k, derive_seed(seed, 2, static_cast<std::uint64_t>(r)));

  std::vector<double> fold_error(static_cast<std::size_t>(repeats) * folds_per, 0.0);
  parallel_for(fold_error.size(), [&](std::size_t item) {
    const auto& test = plan[item / folds_per][item % folds_per];
    std::vector<char> held(static_cast<std::size_t>(X.n()), 0);
    for (Eigen::Index i : test) held[static_cast<std::size_t>(i)] = 1;
    std::vector<Eigen::Index> train;
    std::vector<Object> train_y;
    for (Eigen::Index i = 0; i < X.n(); ++i)
      if (!held[static_cast<std::size_t>(i)]) {
        train.push_back(i);
        train_y.push_back(ys[static_cast<std::size_t>(i)]);
      }
    const PredictorMatrix Xtrain = X.take_rows(train);
    double total = 0.0;
    for (Eigen::Index i : test) {
      const Eigen::VectorXd xi = X.row(i).transpose();
      const double d = space.distance(ys[static_cast<std::size_t>(i)],
                                      fitter(space, Xtrain, std::span<const Object>(train_y), xi));
      total += d * d;
    }
    fold_error[item] = total / static_cast<double>(test.size());
  });

  double sum = 0.0;
  for (double e : fold_error) sum += e;
  return sum / static_cast<double>(fold_error.size());
}

}  // namespace frechet

#endif  // FRECHET_INFERENCE_HPP
