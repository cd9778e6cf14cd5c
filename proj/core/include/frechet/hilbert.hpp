#ifndef FRECHET_HILBERT_HPP
#define FRECHET_HILBERT_HPP

#include <span>

#include <Eigen/Core>

#include "frechet/regression.hpp"

namespace frechet {

// Closed-form global and local Frechet regression for responses in a
// (discretised) Hilbert space, and the Log-Euclidean covariance case.
// These never go through weight vectors and serve as exactness oracles for
// the generic solvers.

/// beta0 + beta1^T (x - Xbar) with beta0 = Ybar, beta1 = Sigma^{-1} gamma1,
/// gamma1 = n^{-1} sum_i (X_i - Xbar) Y_i^T.
Eigen::VectorXd closed_form_global(const PredictorMatrix& X, std::span<const Eigen::VectorXd> ys,
                                   const Eigen::VectorXd& x);

/// Local linear intercept (mu2 r0 - mu1 r1) / sigma0^2 with
/// r_j = n^{-1} sum_i K_h(X_i - x)(X_i - x)^j Y_i.
Eigen::VectorXd closed_form_local(const PredictorMatrix& X, std::span<const Eigen::VectorXd> ys,
                                  double x, double h, Kernel kernel = {});

/// Symmetric strictly positive definite matrix.
class SpdMatrix {
 public:
  static constexpr double kEigenFloor = 1e-10;

  SpdMatrix() = default;
  /// Throws NotPositiveDefinite unless symmetric with eigenvalues > 1e-10.
  explicit SpdMatrix(const Eigen::MatrixXd& m);

  Eigen::Index dim() const noexcept { return m_.rows(); }
  const Eigen::MatrixXd& matrix() const noexcept { return m_; }

 private:
  Eigen::MatrixXd m_;
};

/// Principal matrix logarithm of an SPD matrix.
Eigen::MatrixXd spd_log(const SpdMatrix& a);
/// Matrix exponential of a symmetric matrix.
SpdMatrix sym_exp(const Eigen::MatrixXd& s);

/// Exp((mu2 r0 - mu1 r1) / sigma0^2) with r_j built from Log(Y_i).
SpdMatrix log_euclidean_local(const PredictorMatrix& X, std::span<const SpdMatrix> ys, double x,
                              double h, Kernel kernel = {});

/// SPD matrices with d(A, B) = ||Log A - Log B||_F.
class LogEuclideanSpace {
 public:
  using Object = SpdMatrix;

  double distance(const Object& a, const Object& b) const;
  Object weighted_mean(const WeightVector& w, std::span<const Object> ys) const;
};

static_assert(ObjectSpace<LogEuclideanSpace>);

}  // namespace frechet

#endif  // FRECHET_HILBERT_HPP
