#ifndef FRECHET_CORRELATION_HPP
#define FRECHET_CORRELATION_HPP

#include <span>

#include <Eigen/Core>

#include "frechet/regression.hpp"

namespace frechet {

/// Square symmetric matrix. The constructor symmetrises its input.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(const Eigen::MatrixXd& m);

  Eigen::Index dim() const noexcept { return m_.rows(); }
  const Eigen::MatrixXd& matrix() const noexcept { return m_; }

 private:
  Eigen::MatrixXd m_;
};

struct NearestCorrelationOptions {
  double tolerance = 1e-8;
  int max_iterations = 500;
};

/// Symmetric positive semidefinite matrix with unit diagonal.
class CorrMatrix {
 public:
  static constexpr double kEigenTolerance = -1e-8;

  CorrMatrix() = default;
  /// Validates every invariant; throws ParameterDomain on violation.
  explicit CorrMatrix(const Eigen::MatrixXd& m);

  /// Builds from the r(r-1)/2 strict upper-triangle entries in row-major order.
  static CorrMatrix from_upper_triangle(std::span<const double> entries, Eigen::Index r);
  std::vector<double> upper_triangle() const;

  Eigen::Index dim() const noexcept { return m_.rows(); }
  const Eigen::MatrixXd& matrix() const noexcept { return m_; }
  operator SymMatrix() const { return SymMatrix(m_); }

  bool operator==(const CorrMatrix& other) const { return m_ == other.m_; }

 private:
  struct Unchecked {};
  CorrMatrix(Eigen::MatrixXd m, Unchecked) : m_(std::move(m)) {}
  friend CorrMatrix nearest_correlation(const SymMatrix&, const NearestCorrelationOptions&);

  Eigen::MatrixXd m_;
};

/// Why a matrix fails to be a correlation matrix, or empty when it is one.
std::string correlation_violation(const Eigen::MatrixXd& m);

double frobenius_distance(const SymMatrix& a, const SymMatrix& b);
double frobenius_distance(const CorrMatrix& a, const CorrMatrix& b);

/// Entrywise sum_i w_i Y_i / sum_i w_i. Unit diagonal is preserved; positive
/// semidefiniteness is not.
SymMatrix weighted_matrix_average(const WeightVector& w, std::span<const CorrMatrix> ys);

/// Frobenius-nearest correlation matrix by alternating projections with
/// Dykstra's correction (PSD cone via eigenvalue clipping, unit diagonal by
/// overwrite). Throws NonConvergence with the final residual.
CorrMatrix nearest_correlation(const SymMatrix& b, const NearestCorrelationOptions& options = {});

CorrMatrix fit_correlation(const WeightVector& w, std::span<const CorrMatrix> ys,
                           const NearestCorrelationOptions& options = {});

class CorrelationSpace {
 public:
  using Object = CorrMatrix;

  explicit CorrelationSpace(NearestCorrelationOptions options = {}) : options_(options) {}

  double distance(const Object& a, const Object& b) const { return frobenius_distance(a, b); }
  Object weighted_mean(const WeightVector& w, std::span<const Object> ys) const {
    return fit_correlation(w, ys, options_);
  }

 private:
  NearestCorrelationOptions options_;
};

static_assert(ObjectSpace<CorrelationSpace>);

}  // namespace frechet

#endif  // FRECHET_CORRELATION_HPP
