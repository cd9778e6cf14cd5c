#include "frechet/euclidean.hpp"

namespace frechet {

double EuclideanSpace::distance(const Object& a, const Object& b) const {
  if (a.size() != b.size()) throw Error(ErrorCode::ShapeMismatch, "vectors differ in dimension");
  return (a - b).norm();
}

EuclideanSpace::Object EuclideanSpace::weighted_mean(const WeightVector& w,
                                                     std::span<const Object> ys) const {
  check_weights(w, ys.size());
  Object acc = Object::Zero(ys.front().size());
  for (std::size_t i = 0; i < ys.size(); ++i) {
    if (ys[i].size() != acc.size()) throw Error(ErrorCode::ShapeMismatch, "vectors differ in dimension");
    const double wi = w[static_cast<Eigen::Index>(i)];
    if (wi != 0.0) acc += wi * ys[i];
  }
  return acc / w.sum();
}

}  // namespace frechet
