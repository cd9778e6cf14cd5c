#ifndef FRECHET_REGRESSION_HPP
#define FRECHET_REGRESSION_HPP

#include <concepts>
#include <span>
#include <sstream>

#include <Eigen/Core>

#include "frechet/error.hpp"
#include "frechet/kernel.hpp"
#include "frechet/predictors.hpp"
#include "frechet/weights.hpp"

namespace frechet {

/// A metric space together with a solver for weighted Frechet means
///   argmin_w  sum_i w_i d^2(Y_i, w)
/// that stays correct for signed weights with positive total.
template <class S>
concept ObjectSpace = requires(const S& space, const typename S::Object& a, const WeightVector& w,
                               std::span<const typename S::Object> ys) {
  typename S::Object;
  { space.distance(a, a) } -> std::convertible_to<double>;
  { space.weighted_mean(w, ys) } -> std::same_as<typename S::Object>;
};

template <class Object>
struct FitResult {
  Object value;
  /// n^{-1} sum_i w_i d^2(Y_i, value).
  double objective = 0.0;
};

/// Shared precondition for weighted_mean implementations.
inline void check_weights(const WeightVector& w, std::size_t n) {
  if (static_cast<std::size_t>(w.size()) != n) {
    std::ostringstream msg;
    msg << "weight vector has " << w.size() << " entries for " << n << " objects";
    throw Error(ErrorCode::ShapeMismatch, msg.str());
  }
  if (n == 0) throw Error(ErrorCode::ShapeMismatch, "no objects");
  if (!(w.sum() > 0.0) || !w.values.allFinite())
    throw Error(ErrorCode::ParameterDomain, "weights must be finite with a positive sum");
}

template <ObjectSpace S>
double weighted_objective(const S& space, const WeightVector& w,
                          std::span<const typename S::Object> ys, const typename S::Object& omega) {
  double total = 0.0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    const double wi = w[static_cast<Eigen::Index>(i)];
    if (wi == 0.0) continue;
    const double d = space.distance(ys[i], omega);
    total += wi * d * d;
  }
  return total / static_cast<double>(ys.size());
}

template <ObjectSpace S>
FitResult<typename S::Object> fit_weighted(const S& space, const WeightVector& w,
                                           std::span<const typename S::Object> ys) {
  check_weights(w, ys.size());
  auto value = space.weighted_mean(w, ys);
  const double objective = weighted_objective(space, w, ys, value);
  return {std::move(value), objective};
}

namespace detail {
inline void check_sample(const PredictorMatrix& X, std::size_t n_objects) {
  if (static_cast<std::size_t>(X.n()) != n_objects) {
    std::ostringstream msg;
    msg << X.n() << " predictor rows but " << n_objects << " response objects";
    throw Error(ErrorCode::ShapeMismatch, msg.str());
  }
}
}  // namespace detail

/// Sample Frechet mean (all weights one).
template <ObjectSpace S>
FitResult<typename S::Object> frechet_mean(const S& space, std::span<const typename S::Object> ys) {
  return fit_weighted(space, uniform_weights(static_cast<Eigen::Index>(ys.size())), ys);
}

/// Global Frechet regression at x.
template <ObjectSpace S>
FitResult<typename S::Object> fit_global(const S& space, const PredictorMatrix& X,
                                         std::span<const typename S::Object> ys,
                                         const Eigen::VectorXd& x) {
  detail::check_sample(X, ys.size());
  return fit_weighted(space, global_weights(X, x), ys);
}

/// Local Frechet regression at scalar x.
template <ObjectSpace S>
FitResult<typename S::Object> fit_local(const S& space, const PredictorMatrix& X,
                                        std::span<const typename S::Object> ys, double x, double h,
                                        Kernel kernel = {}) {
  detail::check_sample(X, ys.size());
  return fit_weighted(space, local_weights(X, x, h, kernel), ys);
}

/// Nadaraya-Watson Frechet smoother at scalar x.
template <ObjectSpace S>
FitResult<typename S::Object> fit_nw(const S& space, const PredictorMatrix& X,
                                     std::span<const typename S::Object> ys, double x, double h,
                                     Kernel kernel = {}) {
  detail::check_sample(X, ys.size());
  return fit_weighted(space, nw_weights(X, x, h, kernel), ys);
}

// Fitters bundle a method and its tuning so that inference and the harness
// can refit on resampled data. Each maps (space, X, Y, x) to an object.

struct GlobalFitter {
  template <ObjectSpace S>
  typename S::Object operator()(const S& space, const PredictorMatrix& X,
                                std::span<const typename S::Object> ys,
                                const Eigen::VectorXd& x) const {
    return space.weighted_mean(global_weights(X, x), ys);
  }
};

struct LocalFitter {
  double bandwidth;
  Kernel kernel{};

  template <ObjectSpace S>
  typename S::Object operator()(const S& space, const PredictorMatrix& X,
                                std::span<const typename S::Object> ys,
                                const Eigen::VectorXd& x) const {
    return space.weighted_mean(local_weights(X, x[0], bandwidth, kernel), ys);
  }
};

struct NwFitter {
  double bandwidth;
  Kernel kernel{};

  template <ObjectSpace S>
  typename S::Object operator()(const S& space, const PredictorMatrix& X,
                                std::span<const typename S::Object> ys,
                                const Eigen::VectorXd& x) const {
    return space.weighted_mean(nw_weights(X, x[0], bandwidth, kernel), ys);
  }
};

/// Ignores the predictor: always the sample Frechet mean.
struct MeanFitter {
  template <ObjectSpace S>
  typename S::Object operator()(const S& space, const PredictorMatrix& X,
                                std::span<const typename S::Object> ys,
                                const Eigen::VectorXd&) const {
    return space.weighted_mean(uniform_weights(X.n()), ys);
  }
};

}  // namespace frechet

#endif  // FRECHET_REGRESSION_HPP
