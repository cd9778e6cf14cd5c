#ifndef FRECHET_QUADRATURE_HPP
#define FRECHET_QUADRATURE_HPP

#include <vector>

#include "frechet/error.hpp"

namespace frechet {

/// Midpoint rule on [lower, upper] with `points` equal cells.
struct MidpointGrid {
  double lower = 0.0;
  double upper = 1.0;
  int points = 50;

  double width() const noexcept { return (upper - lower) / points; }
  double node(int k) const noexcept { return lower + (k + 0.5) * width(); }

  std::vector<double> nodes() const {
    if (points < 1 || !(upper > lower))
      throw Error(ErrorCode::ParameterDomain, "integration grid needs points >= 1 and upper > lower");
    std::vector<double> out(static_cast<std::size_t>(points));
    for (int k = 0; k < points; ++k) out[static_cast<std::size_t>(k)] = node(k);
    return out;
  }

  /// Integral of f over [lower, upper].
  template <class F>
  double integrate(F&& f) const {
    double total = 0.0;
    for (double x : nodes()) total += f(x);
    return total * width();
  }

  bool operator==(const MidpointGrid&) const = default;
};

}  // namespace frechet

#endif  // FRECHET_QUADRATURE_HPP
