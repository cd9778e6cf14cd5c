#ifndef FRECHET_PREDICTORS_HPP
#define FRECHET_PREDICTORS_HPP

#include <span>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace frechet {

/// n x p matrix of Euclidean predictors with its sample mean and the
/// 1/n-normalised sample covariance. Construction fails with
/// CovarianceSingular when the covariance is numerically rank deficient.
class PredictorMatrix {
 public:
  static constexpr double kDefaultTolerance = 1e-10;

  explicit PredictorMatrix(Eigen::MatrixXd data, double tolerance = kDefaultTolerance);

  /// Convenience constructor for a scalar predictor.
  static PredictorMatrix from_column(std::span<const double> values,
                                     double tolerance = kDefaultTolerance);

  Eigen::Index n() const noexcept { return data_.rows(); }
  Eigen::Index p() const noexcept { return data_.cols(); }

  const Eigen::MatrixXd& data() const noexcept { return data_; }
  auto row(Eigen::Index i) const { return data_.row(i); }
  const Eigen::VectorXd& mean() const noexcept { return mean_; }
  const Eigen::MatrixXd& covariance() const noexcept { return covariance_; }
  double smallest_eigenvalue() const noexcept { return min_eigenvalue_; }

  /// Sigma^{-1} v through the Cholesky factor.
  Eigen::VectorXd solve(const Eigen::VectorXd& v) const;

  /// Predictor restricted to the given columns, in the given order.
  PredictorMatrix select(std::span<const int> columns) const;

  /// Rows reordered (or subsetted) according to `rows`.
  PredictorMatrix take_rows(std::span<const Eigen::Index> rows) const;

  double tolerance() const noexcept { return tolerance_; }

 private:
  Eigen::MatrixXd data_;
  Eigen::VectorXd mean_;
  Eigen::MatrixXd covariance_;
  Eigen::LLT<Eigen::MatrixXd> factor_;
  double min_eigenvalue_ = 0.0;
  double tolerance_;
};

}  // namespace frechet

#endif  // FRECHET_PREDICTORS_HPP
