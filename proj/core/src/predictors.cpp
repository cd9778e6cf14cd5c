#include "frechet/predictors.hpp"

#include <sstream>

#include <Eigen/Eigenvalues>

#include "frechet/error.hpp"

namespace frechet {

PredictorMatrix::PredictorMatrix(Eigen::MatrixXd data, double tolerance)
    : data_(std::move(data)), tolerance_(tolerance) {
  const Eigen::Index n = data_.rows();
  const Eigen::Index p = data_.cols();
  if (p < 1) throw Error(ErrorCode::ShapeMismatch, "predictor matrix has no columns");
  if (n < p + 2) {
    std::ostringstream msg;
    msg << "need at least p + 2 = " << p + 2 << " observations, got " << n;
    throw Error(ErrorCode::CovarianceSingular, msg.str());
  }
  if (!data_.allFinite()) throw Error(ErrorCode::DataFormat, "non-finite predictor value");

  mean_ = data_.colwise().mean().transpose();
  const Eigen::MatrixXd centered = data_.rowwise() - mean_.transpose();
  covariance_ = (centered.transpose() * centered) / static_cast<double>(n);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(covariance_, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  min_eigenvalue_ = lo;
  if (!(hi > 0.0) || lo <= tolerance_ * hi) {
    std::ostringstream msg;
    msg << "sample covariance is singular: smallest eigenvalue " << lo << " <= " << tolerance_
        << " * largest eigenvalue " << hi;
    throw Error(ErrorCode::CovarianceSingular, msg.str());
  }
  factor_.compute(covariance_);
}

PredictorMatrix PredictorMatrix::from_column(std::span<const double> values, double tolerance) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(values.size()), 1);
  for (std::size_t i = 0; i < values.size(); ++i) m(static_cast<Eigen::Index>(i), 0) = values[i];
  return PredictorMatrix(std::move(m), tolerance);
}

Eigen::VectorXd PredictorMatrix::solve(const Eigen::VectorXd& v) const { return factor_.solve(v); }

PredictorMatrix PredictorMatrix::select(std::span<const int> columns) const {
  Eigen::MatrixXd sub(n(), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j] < 0 || columns[j] >= p())
      throw Error(ErrorCode::ShapeMismatch, "predictor column index out of range");
    sub.col(static_cast<Eigen::Index>(j)) = data_.col(columns[j]);
  }
  return PredictorMatrix(std::move(sub), tolerance_);
}

PredictorMatrix PredictorMatrix::take_rows(std::span<const Eigen::Index> rows) const {
  Eigen::MatrixXd sub(static_cast<Eigen::Index>(rows.size()), p());
  for (std::size_t i = 0; i < rows.size(); ++i) sub.row(static_cast<Eigen::Index>(i)) = data_.row(rows[i]);
  return PredictorMatrix(std::move(sub), tolerance_);
}

}  // namespace frechet
