#ifndef FRECHET_EUCLIDEAN_HPP
#define FRECHET_EUCLIDEAN_HPP

#include <span>

#include <Eigen/Core>

#include "frechet/regression.hpp"

namespace frechet {

/// R^m with the Euclidean metric. The weighted Frechet mean is the weighted
/// average sum_i w_i y_i / sum_i w_i.
class EuclideanSpace {
 public:
  using Object = Eigen::VectorXd;

  double distance(const Object& a, const Object& b) const;
  Object weighted_mean(const WeightVector& w, std::span<const Object> ys) const;
};

static_assert(ObjectSpace<EuclideanSpace>);

}  // namespace frechet

#endif  // FRECHET_EUCLIDEAN_HPP
