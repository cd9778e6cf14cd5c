#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "frechet/correlation.hpp"
#include "support.hpp"

using namespace frechet;

namespace {

void expect_valid(const CorrMatrix& c) {
  const Eigen::MatrixXd& m = c.matrix();
  EXPECT_LE((m - m.transpose()).cwiseAbs().maxCoeff(), 1e-12);
  for (Eigen::Index i = 0; i < m.rows(); ++i) EXPECT_EQ(m(i, i), 1.0);
  EXPECT_GE(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m).eigenvalues().minCoeff(), -1e-8);
  EXPECT_LE(m.cwiseAbs().maxCoeff(), 1.0);
}

Eigen::MatrixXd random_symmetric_unit_diagonal(support::Rng& rng, Eigen::Index r) {
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  Eigen::MatrixXd b(r, r);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = i; j < r; ++j) b(i, j) = b(j, i) = i == j ? 1.0 : u(rng);
  return b;
}

}  // namespace

TEST(CorrMatrix, ValidationAndTriangleRoundTrip) {
  EXPECT_THROW(CorrMatrix(Eigen::Matrix2d{{1.0, 1.5}, {1.5, 1.0}}), Error);
  EXPECT_THROW(CorrMatrix(Eigen::Matrix2d{{2.0, 0.0}, {0.0, 1.0}}), Error);
  EXPECT_THROW(CorrMatrix(Eigen::Matrix2d{{1.0, 0.2}, {0.3, 1.0}}), Error);
  const std::vector<double> upper{0.2, -0.1, 0.4};
  const auto c = CorrMatrix::from_upper_triangle(upper, 3);
  EXPECT_EQ(c.upper_triangle(), upper);
  EXPECT_EQ(c.matrix()(2, 1), 0.4);
  EXPECT_THROW(CorrMatrix::from_upper_triangle(upper, 4), Error);
  EXPECT_FALSE(correlation_violation(Eigen::Matrix2d{{1.0, 1.5}, {1.5, 1.0}}).empty());
}

TEST(FrobeniusDistance, Examples) {
  const CorrMatrix id(Eigen::Matrix2d::Identity());
  const CorrMatrix ones(Eigen::Matrix2d::Ones());
  EXPECT_EQ(frobenius_distance(id, id), 0.0);
  EXPECT_NEAR(frobenius_distance(id, ones), std::sqrt(2.0), 1e-15);
  support::Rng rng(1);
  const Eigen::MatrixXd a = support::random_correlation(rng, 4), b = support::random_correlation(rng, 4);
  double s = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) s += (a(i, j) - b(i, j)) * (a(i, j) - b(i, j));
  EXPECT_NEAR(frobenius_distance(CorrMatrix(a), CorrMatrix(b)), std::sqrt(s), 1e-14);
  EXPECT_THROW(frobenius_distance(CorrMatrix(a), id), Error);
}

TEST(WeightedMatrixAverage, UnitDiagonalAndIndefiniteness) {
  support::Rng rng(2);
  const CorrMatrix a(support::random_correlation(rng, 3));
  const std::vector<CorrMatrix> same(3, a);
  EXPECT_LT((weighted_matrix_average({Eigen::Vector3d(1, 1, 1), {}}, same).matrix() - a.matrix()).norm(), 1e-15);

  const CorrMatrix p(Eigen::Matrix2d{{1.0, 0.9}, {0.9, 1.0}});
  const CorrMatrix q(Eigen::Matrix2d{{1.0, -0.9}, {-0.9, 1.0}});
  const std::vector<CorrMatrix> pair{p, q};
  const auto avg = weighted_matrix_average({Eigen::Vector2d(2.0, -1.0), {}}, pair);
  EXPECT_DOUBLE_EQ(avg.matrix()(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(avg.matrix()(1, 1), 1.0);
  EXPECT_LT(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(avg.matrix()).eigenvalues().minCoeff(), 0.0);
}

TEST(NearestCorrelation, ReferenceThreeByThree) {
  const SymMatrix b(Eigen::Matrix3d{{1, 1, 0}, {1, 1, 1}, {0, 1, 1}});
  const auto c = nearest_correlation(b);
  expect_valid(c);
  EXPECT_NEAR(c.matrix()(0, 1), 0.7607, 1e-4);
  EXPECT_NEAR(c.matrix()(0, 2), 0.1573, 1e-4);
  EXPECT_NEAR(c.matrix()(1, 2), 0.7607, 1e-4);
  const Eigen::MatrixXd ref = support::nearest_correlation_dual(b.matrix());
  EXPECT_NEAR((c.matrix() - b.matrix()).squaredNorm(), (ref - b.matrix()).squaredNorm(), 1e-6);
}

TEST(NearestCorrelation, TwoByTwoClipsToOne) {
  const auto c = nearest_correlation(SymMatrix(Eigen::Matrix2d{{1.0, 1.5}, {1.5, 1.0}}));
  EXPECT_NEAR(c.matrix()(0, 1), 1.0, 1e-7);
  expect_valid(c);
}

TEST(NearestCorrelation, ValidInputUnchangedAndIdempotent) {
  support::Rng rng(3);
  for (int t = 0; t < 30; ++t) {
    const Eigen::MatrixXd a = support::random_correlation(rng, 4);
    EXPECT_LT((nearest_correlation(SymMatrix(a)).matrix() - a).norm(), 1e-12);
    const auto c = nearest_correlation(SymMatrix(random_symmetric_unit_diagonal(rng, 4)));
    EXPECT_LT((nearest_correlation(SymMatrix(c.matrix())).matrix() - c.matrix()).norm(), 1e-10);
  }
}

TEST(NearestCorrelation, NonConvergenceIsReported) {
  const SymMatrix b(Eigen::Matrix3d{{1, 1, 0}, {1, 1, 1}, {0, 1, 1}});
  try {
    nearest_correlation(b, {1e-14, 3});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonConvergence);
  }
}

TEST(NearestCorrelation, FeasibleDirectionsDoNotImprove) {
  support::Rng rng(4);
  std::uniform_real_distribution<double> step(0.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    const Eigen::MatrixXd b = random_symmetric_unit_diagonal(rng, 4);
    const Eigen::MatrixXd c = nearest_correlation(SymMatrix(b)).matrix();
    const double base = (c - b).squaredNorm();
    for (int d = 0; d < 100; ++d) {
      // Segment towards another correlation matrix stays feasible.
      const Eigen::MatrixXd other = support::random_correlation(rng, 4);
      const Eigen::MatrixXd z = c + 0.05 * step(rng) * (other - c);
      EXPECT_GE((z - b).squaredNorm(), base - 1e-9);
    }
  }
}

TEST(FitCorrelation, IdenticalValidAndRandomSearchBound) {
  support::Rng rng(5);
  const CorrMatrix a(support::random_correlation(rng, 3));
  const std::vector<CorrMatrix> same(5, a);
  EXPECT_LT((fit_correlation({Eigen::VectorXd::Ones(5), {}}, same).matrix() - a.matrix()).norm(), 1e-12);

  std::vector<CorrMatrix> ys;
  for (int i = 0; i < 10; ++i) ys.emplace_back(support::random_correlation(rng, 3, 1 + i % 3));
  Eigen::VectorXd w = support::uniform_vector(rng, 10, -1.0, 2.0);
  w[0] += 10.0 - w.sum();
  const WeightVector wv{w, {}};
  const CorrelationSpace space;
  const auto fit = fit_weighted(space, wv, std::span<const CorrMatrix>(ys));
  expect_valid(fit.value);
  for (int t = 0; t < 10000; ++t) {
    const CorrMatrix cand(support::random_correlation(rng, 3, 1 + t % 4));
    EXPECT_LE(fit.objective, weighted_objective(space, wv, std::span<const CorrMatrix>(ys), cand) + 1e-12);
  }
}

TEST(FitCorrelation, GlobalAtMeanIsNearestToPlainAverage) {
  support::Rng rng(6);
  std::vector<CorrMatrix> ys;
  for (int i = 0; i < 12; ++i) ys.emplace_back(support::random_correlation(rng, 4, 2));
  const PredictorMatrix X(support::gaussian_matrix(rng, 12, 2));
  const auto fit = fit_global(CorrelationSpace{}, X, std::span<const CorrMatrix>(ys), X.mean());
  const auto plain = nearest_correlation(weighted_matrix_average({Eigen::VectorXd::Ones(12), {}}, ys));
  EXPECT_LT((fit.value.matrix() - plain.matrix()).norm(), 1e-10);
}
