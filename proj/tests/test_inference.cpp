#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "frechet/correlation.hpp"
#include "frechet/euclidean.hpp"
#include "frechet/inference.hpp"
#include "frechet/wasserstein.hpp"
#include "support.hpp"

using namespace frechet;

namespace {

std::vector<Eigen::VectorXd> rows_of(const Eigen::MatrixXd& Y) {
  std::vector<Eigen::VectorXd> out;
  for (Eigen::Index i = 0; i < Y.rows(); ++i) out.emplace_back(Y.row(i).transpose());
  return out;
}

using Span = std::span<const Eigen::VectorXd>;

}  // namespace

TEST(AdjustedR2, FormulaAndDomain) {
  EXPECT_DOUBLE_EQ(adjusted_r2(0.5, 21, 2), 0.5 - 0.5 * 2.0 / 18.0);
  EXPECT_LE(adjusted_r2(0.3, 50, 3), 0.3);
  EXPECT_THROW(adjusted_r2(0.5, 3, 2), Error);
}

TEST(FrechetR2, NoiselessGlobalModelGivesOne) {
  support::Rng rng(1);
  const Eigen::MatrixXd Xd = support::gaussian_matrix(rng, 25, 2);
  const Eigen::MatrixXd Y = support::with_intercept(Xd) * support::gaussian_matrix(rng, 3, 4);
  const auto ys = rows_of(Y);
  const auto r = frechet_r2(EuclideanSpace{}, PredictorMatrix(Xd), Span(ys), GlobalFitter{});
  EXPECT_NEAR(r.r2, 1.0, 1e-12);
  EXPECT_EQ(r.n, 25);
  EXPECT_EQ(r.q, 2);
}

TEST(FrechetR2, EqualsClassicalR2) {
  support::Rng rng(2);
  for (int t = 0; t < 20; ++t) {
    const Eigen::MatrixXd Xd = support::gaussian_matrix(rng, 40, 3);
    const Eigen::MatrixXd Y = support::with_intercept(Xd) * support::gaussian_matrix(rng, 4, 2) +
                              support::gaussian_matrix(rng, 40, 2);
    const auto ys = rows_of(Y);
    const auto r = frechet_r2(EuclideanSpace{}, PredictorMatrix(Xd), Span(ys), GlobalFitter{});
    EXPECT_NEAR(r.r2, support::classical_r2(Xd, Y), 1e-10);
    EXPECT_LE(r.r2_adjusted, r.r2);
  }
}

TEST(FrechetR2, IndependentDataNearZero) {
  support::Rng rng(3);
  const Eigen::MatrixXd Xd = support::gaussian_matrix(rng, 500, 1);
  const auto ys = rows_of(support::gaussian_matrix(rng, 500, 1));
  const auto r = frechet_r2(EuclideanSpace{}, PredictorMatrix(Xd), Span(ys), GlobalFitter{});
  EXPECT_LT(std::abs(r.r2), 0.1);
}

TEST(FrechetR2, ConstantResponsesAreDegenerate) {
  support::Rng rng(4);
  const std::vector<Eigen::VectorXd> ys(10, Eigen::Vector2d(1.0, 2.0));
  try {
    frechet_r2(EuclideanSpace{}, PredictorMatrix(support::gaussian_matrix(rng, 10, 1)), Span(ys), GlobalFitter{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateResponse);
  }
}

TEST(FrechetR2, InvariantUnderResponseIsometry) {
  support::Rng rng(5);
  const Eigen::MatrixXd Xd = support::gaussian_matrix(rng, 30, 2);
  const Eigen::MatrixXd Y = Xd * support::gaussian_matrix(rng, 2, 3) + support::gaussian_matrix(rng, 30, 3);
  const Eigen::Matrix3d R = support::random_rotation(rng);
  const Eigen::RowVector3d shift(4.0, -2.0, 9.0);
  const Eigen::MatrixXd Y2 = (Y * R.transpose()).rowwise() + shift;
  const auto a = rows_of(Y), b = rows_of(Y2);
  const PredictorMatrix X(Xd);
  EXPECT_NEAR(frechet_r2(EuclideanSpace{}, X, Span(a), GlobalFitter{}).r2,
              frechet_r2(EuclideanSpace{}, X, Span(b), GlobalFitter{}).r2, 1e-10);
}

TEST(FrechetR2, InvariantUnderAffinePredictorMaps) {
  support::Rng rng(6);
  const QuantileGrid grid(50);
  const auto s = simulate_setting1(30, DistributionModel::setting1(), grid, 6);
  const WassersteinSpace space(grid);
  Eigen::MatrixXd Xd(30, 2);
  Xd.col(0) = s.x;
  Xd.col(1) = support::gaussian_matrix(rng, 30, 1).col(0);
  Eigen::Matrix2d A;
  A << 2.0, 1.0, -0.5, 3.0;
  const Eigen::MatrixXd Xa = (Xd * A).rowwise() + Eigen::RowVector2d(5.0, -1.0);
  const auto r1 = frechet_r2(space, PredictorMatrix(Xd), std::span<const QuantileFunction>(s.y), GlobalFitter{});
  const auto r2 = frechet_r2(space, PredictorMatrix(Xa), std::span<const QuantileFunction>(s.y), GlobalFitter{});
  EXPECT_NEAR(r1.r2, r2.r2, 1e-9);
}

TEST(PermutationPValue, Formula) {
  std::vector<double> null(99, 0.1);
  EXPECT_DOUBLE_EQ(permutation_p_value(0.5, null), 0.01);
  null[3] = 0.5;
  null[7] = 0.9;
  EXPECT_DOUBLE_EQ(permutation_p_value(0.5, null), 0.03);
}

TEST(PermutationPValue, MatchesRankComputation) {
  support::Rng rng(7);
  std::normal_distribution<double> z(0.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> null(199);
    for (auto& v : null) v = z(rng);
    const double obs = z(rng);
    // Rank of the observed value among all B + 1 statistics, counting ties
    // against it; a monotone transform of every statistic keeps the rank.
    std::vector<double> all = null;
    all.push_back(obs);
    for (auto& v : all) v = std::exp(3.0 * v);
    const double tobs = all.back();
    const auto rank = std::count_if(all.begin(), all.end(), [tobs](double v) { return v >= tobs; });
    EXPECT_DOUBLE_EQ(permutation_p_value(obs, null), static_cast<double>(rank) / 200.0);
  }
}

TEST(PermutationTest, RequiresEnoughPermutations) {
  support::Rng rng(8);
  const auto ys = rows_of(support::gaussian_matrix(rng, 10, 1));
  EXPECT_THROW(permutation_test(EuclideanSpace{}, PredictorMatrix(support::gaussian_matrix(rng, 10, 1)), Span(ys),
                                GlobalFitter{}, 50, 1),
               Error);
}

TEST(PermutationTest, StrongWassersteinEffectIsDetected) {
  DistributionModel m;
  m.beta = 6.0;
  const QuantileGrid grid(100);
  const auto s = simulate_setting1(50, m, grid, 8);
  const auto r = permutation_test(WassersteinSpace(grid), PredictorMatrix(Eigen::MatrixXd(s.x)),
                                  std::span<const QuantileFunction>(s.y), GlobalFitter{}, 199, 9);
  EXPECT_LE(r.p_value, 0.01);
  EXPECT_EQ(r.null_stats.size(), 199u);
  EXPECT_DOUBLE_EQ(r.p_value, permutation_p_value(r.observed_stat, r.null_stats));
}

TEST(PermutationTest, DeterministicAcrossWorkerCounts) {
  support::Rng rng(9);
  const Eigen::MatrixXd Xd = support::gaussian_matrix(rng, 30, 1);
  const auto ys = rows_of(support::gaussian_matrix(rng, 30, 2));
  const PredictorMatrix X(Xd);
  setenv("FRECHET_THREADS", "1", 1);
  const auto a = permutation_test(EuclideanSpace{}, X, Span(ys), GlobalFitter{}, 99, 42);
  setenv("FRECHET_THREADS", "4", 1);
  const auto b = permutation_test(EuclideanSpace{}, X, Span(ys), GlobalFitter{}, 99, 42);
  unsetenv("FRECHET_THREADS");
  EXPECT_EQ(a.null_stats, b.null_stats);
  EXPECT_EQ(a.p_value, b.p_value);
}

TEST(SelectModel, KeepsTheRelevantPredictorAndMaximisesAdjustedR2) {
  support::Rng rng(10);
  int hits = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const Eigen::MatrixXd Xd = support::gaussian_matrix(rng, 200, 4);
    Eigen::MatrixXd Y = support::gaussian_matrix(rng, 200, 1);
    Y.col(0) += 1.0 * Xd.col(2);
    const auto ys = rows_of(Y);
    const auto sel = select_model(EuclideanSpace{}, PredictorMatrix(Xd), Span(ys), GlobalFitter{});
    EXPECT_EQ(sel.candidates.size(), 15u);
    if (std::ranges::find(sel.columns, 2) != sel.columns.end()) ++hits;
    for (const auto& c : sel.candidates) EXPECT_LE(c.report.r2_adjusted, sel.report.r2_adjusted);
  }
  EXPECT_GE(hits, 90);
}

TEST(SelectModel, SinglePredictorAndCap) {
  support::Rng rng(11);
  const auto ys = rows_of(support::gaussian_matrix(rng, 20, 1));
  const auto sel = select_model(EuclideanSpace{}, PredictorMatrix(support::gaussian_matrix(rng, 20, 1)), Span(ys),
                                GlobalFitter{});
  EXPECT_EQ(sel.columns, std::vector<int>{0});
  const auto many = rows_of(support::gaussian_matrix(rng, 40, 1));
  EXPECT_THROW(select_model(EuclideanSpace{}, PredictorMatrix(support::gaussian_matrix(rng, 40, 16)), Span(many),
                            GlobalFitter{}),
               Error);
}

TEST(SelectModel, DuplicatedColumnSurfacesSingularity) {
  support::Rng rng(12);
  Eigen::MatrixXd Xd = support::gaussian_matrix(rng, 20, 2);
  Xd.col(1) = Xd.col(0);
  const auto ys = rows_of(support::gaussian_matrix(rng, 20, 1));
  try {
    select_model(EuclideanSpace{}, PredictorMatrix(Xd), Span(ys), GlobalFitter{});
    FAIL() << "duplicated column accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CovarianceSingular);
  }
}

TEST(MakeFolds, BalancedPartition) {
  const auto folds = make_folds(23, 5, 3);
  ASSERT_EQ(folds.size(), 5u);
  std::vector<Eigen::Index> all;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    EXPECT_EQ(folds[f].size(), f < 3 ? 5u : 4u);
    all.insert(all.end(), folds[f].begin(), folds[f].end());
  }
  std::sort(all.begin(), all.end());
  std::vector<Eigen::Index> expected(23);
  std::iota(expected.begin(), expected.end(), 0);
  EXPECT_EQ(all, expected);
  EXPECT_EQ(make_folds(23, 5, 3), folds);
}

TEST(CvPredictionError, ZeroNoiseLinearData) {
  support::Rng rng(13);
  const Eigen::MatrixXd Xd = support::gaussian_matrix(rng, 30, 2);
  const auto ys = rows_of(support::with_intercept(Xd) * support::gaussian_matrix(rng, 3, 2));
  EXPECT_LT(cv_prediction_error(EuclideanSpace{}, PredictorMatrix(Xd), Span(ys), GlobalFitter{}, 5, 3, 1), 1e-10);
}

TEST(CvPredictionError, LeaveOneOutMatchesDirectLoop) {
  support::Rng rng(14);
  const Eigen::MatrixXd Xd = support::gaussian_matrix(rng, 12, 1);
  const Eigen::MatrixXd Y = Xd * 2.0 + support::gaussian_matrix(rng, 12, 1);
  const auto ys = rows_of(Y);
  double direct = 0.0;
  for (int i = 0; i < 12; ++i) {
    Eigen::MatrixXd Xi(11, 1), Yi(11, 1);
    for (int j = 0, r = 0; j < 12; ++j)
      if (j != i) {
        Xi(r, 0) = Xd(j, 0);
        Yi(r++, 0) = Y(j, 0);
      }
    const double pred = support::ols_predict(Xi, Yi, Xd.row(i).transpose())[0];
    direct += (pred - Y(i, 0)) * (pred - Y(i, 0));
  }
  EXPECT_NEAR(cv_prediction_error(EuclideanSpace{}, PredictorMatrix(Xd), Span(ys), GlobalFitter{}, 12, 1, 5),
              direct / 12, 1e-10);
  EXPECT_THROW(cv_prediction_error(EuclideanSpace{}, PredictorMatrix(Xd), Span(ys), GlobalFitter{}, 13, 1, 5), Error);
  EXPECT_THROW(cv_prediction_error(EuclideanSpace{}, PredictorMatrix(Xd), Span(ys), GlobalFitter{}, 1, 1, 5), Error);
}

TEST(CvPredictionError, TrueModelBeatsConstantFit) {
  const QuantileGrid grid(50);
  const WassersteinSpace space(grid);
  int wins = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const auto s = simulate_setting1(40, DistributionModel::setting1(), grid, 1000 + rep);
    const PredictorMatrix X{Eigen::MatrixXd(s.x)};
    const std::span<const QuantileFunction> ys(s.y);
    const double global = cv_prediction_error(space, X, ys, GlobalFitter{}, 5, 1, rep);
    const double constant = cv_prediction_error(space, X, ys, MeanFitter{}, 5, 1, rep);
    if (global <= constant) ++wins;
  }
  EXPECT_GT(wins, 50);
}

TEST(CvPredictionError, CorrelationResponsesRun) {
  support::Rng rng(15);
  std::vector<CorrMatrix> ys;
  for (int i = 0; i < 20; ++i) ys.emplace_back(support::random_correlation(rng, 3));
  const double e = cv_prediction_error(CorrelationSpace{}, PredictorMatrix(support::gaussian_matrix(rng, 20, 1)),
                                       std::span<const CorrMatrix>(ys), GlobalFitter{}, 4, 2, 3);
  EXPECT_GT(e, 0.0);
}
