#ifndef FRECHET_WASSERSTEIN_HPP
#define FRECHET_WASSERSTEIN_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "frechet/quadrature.hpp"
#include "frechet/regression.hpp"

namespace frechet {

/// Equispaced probability levels u_j = (j - 1/2) / M, j = 1..M.
class QuantileGrid {
 public:
  static constexpr int kDefaultSize = 1000;

  explicit QuantileGrid(int size = kDefaultSize);

  int size() const noexcept { return static_cast<int>(levels_.size()); }
  std::span<const double> levels() const noexcept { return levels_; }
  /// Phi^{-1}(u_j), the standard normal quantiles on the grid.
  std::span<const double> normal_scores() const noexcept { return *scores_; }

  bool operator==(const QuantileGrid& other) const noexcept { return size() == other.size(); }

 private:
  std::vector<double> levels_;
  std::shared_ptr<const std::vector<double>> scores_;
};

/// Nondecreasing quantile values on a QuantileGrid.
class QuantileFunction {
 public:
  static constexpr double kMonotoneTolerance = 1e-12;

  QuantileFunction() = default;
  /// Validates finiteness and monotonicity; throws ParameterDomain otherwise.
  explicit QuantileFunction(Eigen::VectorXd values);

  int size() const noexcept { return static_cast<int>(values_.size()); }
  const Eigen::VectorXd& values() const noexcept { return values_; }
  double operator[](int j) const { return values_[j]; }

  bool operator==(const QuantileFunction&) const = default;

 private:
  struct Unchecked {};
  QuantileFunction(Eigen::VectorXd values, Unchecked) : values_(std::move(values)) {}
  friend QuantileFunction isotonic_projection(const Eigen::VectorXd& g);

  Eigen::VectorXd values_;
};

/// sqrt(M^{-1} sum_j (q1_j - q2_j)^2). Throws GridMismatch on size mismatch.
double wasserstein_distance(const QuantileFunction& q1, const QuantileFunction& q2);

/// Pointwise sum_i w_i Q_i / sum_i w_i. May be non-monotone under negative
/// weights.
Eigen::VectorXd weighted_quantile_average(const WeightVector& w, std::span<const QuantileFunction> qs);

/// L2 projection onto the nondecreasing cone by pool-adjacent-violators.
QuantileFunction isotonic_projection(const Eigen::VectorXd& g);

/// Weighted Wasserstein Frechet mean: projection of the weighted average.
QuantileFunction fit_distribution(const WeightVector& w, std::span<const QuantileFunction> qs);

class WassersteinSpace {
 public:
  using Object = QuantileFunction;

  explicit WassersteinSpace(QuantileGrid grid = QuantileGrid{}) : grid_(std::move(grid)) {}

  const QuantileGrid& grid() const noexcept { return grid_; }

  double distance(const Object& a, const Object& b) const { return wasserstein_distance(a, b); }
  Object weighted_mean(const WeightVector& w, std::span<const Object> ys) const {
    return fit_distribution(w, ys);
  }

 private:
  QuantileGrid grid_;
};

static_assert(ObjectSpace<WassersteinSpace>);

// ---------------------------------------------------------------------------
// Simulation

/// Parameters of the location-scale generative model
///   m(x) = mu0 + beta x + (sigma0 + gamma x) Phi^{-1}.
struct DistributionModel {
  double mu0 = 0.0;
  double beta = 3.0;
  double sigma0 = 3.0;
  double gamma = 0.5;
  double v1 = 0.25;
  double v2 = 1.0;
  /// Transport maps T_k for k in {-l..l}\{0}; used by setting 2 only.
  int l = 2;

  static DistributionModel setting1() { return {}; }
  bool operator==(const DistributionModel&) const = default;
  static DistributionModel setting2() { return {0.0, 3.0, 3.0, 0.5, 1.0, 2.0, 2}; }

  /// Throws ParameterDomain when sigma0 + gamma x <= 0 somewhere on [-1, 1]
  /// or a variance is negative.
  void validate() const;

  /// True regression function evaluated on the grid.
  QuantileFunction truth(double x, const QuantileGrid& grid) const;
};

struct WassersteinSample {
  Eigen::VectorXd x;
  std::vector<QuantileFunction> y;
  /// Latent location and scale draws.
  std::vector<double> mu;
  std::vector<double> sigma;
  /// Transport index per observation (0 in setting 1).
  std::vector<int> k;
};

/// T_k(x) = x - sin(kx)/|k|.
double transport_map(int k, double x);

WassersteinSample simulate_setting1(int n, const DistributionModel& model, const QuantileGrid& grid,
                                    std::uint64_t seed);
WassersteinSample simulate_setting2(int n, const DistributionModel& model, const QuantileGrid& grid,
                                    std::uint64_t seed);

/// Integral over the grid of d_W^2(fit(x), truth(x)) by the midpoint rule.
double ise(const std::function<QuantileFunction(double)>& fit,
           const std::function<QuantileFunction(double)>& truth, const MidpointGrid& xgrid);

/// Linear fit a + b x.
struct Line {
  double intercept = 0.0;
  double slope = 0.0;
  double operator()(double x) const noexcept { return intercept + slope * x; }
};

/// Least squares line subject to line(-1) >= floor and line(1) >= floor,
/// solved by enumerating the active sets of the two endpoint constraints.
Line constrained_positive_line(std::span<const double> x, std::span<const double> y,
                               double floor = 1e-6);

/// Parametric oracle for setting 1: OLS of the latent means on X and
/// positivity-constrained least squares of the latent scales on X.
class OracleRegression {
 public:
  OracleRegression(const WassersteinSample& sample, QuantileGrid grid);

  QuantileFunction operator()(double x) const;
  const Line& location() const noexcept { return location_; }
  const Line& scale() const noexcept { return scale_; }

 private:
  Line location_;
  Line scale_;
  QuantileGrid grid_;
};

OracleRegression oracle_regression_setting1(const WassersteinSample& sample, const QuantileGrid& grid);

}  // namespace frechet

#endif  // FRECHET_WASSERSTEIN_HPP
