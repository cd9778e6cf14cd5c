#ifndef FRECHET_WEIGHTS_HPP
#define FRECHET_WEIGHTS_HPP

#include <Eigen/Core>

#include "frechet/kernel.hpp"
#include "frechet/predictors.hpp"

namespace frechet {

enum class WeightScheme { Uniform, Global, Local, NadarayaWatson };

struct WeightOrigin {
  WeightScheme scheme = WeightScheme::Uniform;
  double bandwidth = 0.0;
  KernelShape kernel = KernelShape::Epanechnikov;
};

/// Signed per-observation weights. For every scheme the values average to 1,
/// so n^{-1} sum_i w_i d^2(Y_i, .) is a proper weighted Frechet objective.
struct WeightVector {
  Eigen::VectorXd values;
  WeightOrigin origin;

  Eigen::Index size() const noexcept { return values.size(); }
  double operator[](Eigen::Index i) const { return values[i]; }
  double sum() const { return values.sum(); }
  double mean() const { return values.mean(); }
};

WeightVector uniform_weights(Eigen::Index n);

/// s_in(x) = 1 + (X_i - Xbar)^T Sigma^{-1} (x - Xbar).
WeightVector global_weights(const PredictorMatrix& X, const Eigen::VectorXd& x);

/// Local-linear weights for a scalar predictor:
///   s_in(x, h) = K_h(X_i - x) [mu2 - mu1 (X_i - x)] / sigma0^2
/// with mu_j = n^{-1} sum_i K_h(X_i - x)(X_i - x)^j and
/// sigma0^2 = mu0 mu2 - mu1^2. Throws BandwidthTooSmall when fewer than two
/// distinct predictor values fall inside the kernel window.
WeightVector local_weights(const PredictorMatrix& X, double x, double h, Kernel kernel = {});

/// Kernel weights K_h(X_i - x), rescaled to average 1. Throws EmptyWindow
/// when every weight vanishes.
WeightVector nw_weights(const PredictorMatrix& X, double x, double h, Kernel kernel = {});

/// Raw kernel moments mu_0, mu_1, mu_2 at x (used by the closed forms).
struct LocalMoments {
  double mu0 = 0.0;
  double mu1 = 0.0;
  double mu2 = 0.0;
  double sigma0_sq() const noexcept { return mu0 * mu2 - mu1 * mu1; }
};

LocalMoments local_moments(const PredictorMatrix& X, double x, double h, Kernel kernel = {});

}  // namespace frechet

#endif  // FRECHET_WEIGHTS_HPP
