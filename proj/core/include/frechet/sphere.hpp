#ifndef FRECHET_SPHERE_HPP
#define FRECHET_SPHERE_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "frechet/quadrature.hpp"
#include "frechet/regression.hpp"

namespace frechet {

/// Point on S^2. Renormalised on construction.
class UnitVector {
 public:
  UnitVector() : v_(0.0, 0.0, 1.0) {}
  explicit UnitVector(const Eigen::Vector3d& v);
  UnitVector(double x, double y, double z) : UnitVector(Eigen::Vector3d(x, y, z)) {}

  const Eigen::Vector3d& coords() const noexcept { return v_; }
  double operator[](int i) const { return v_[i]; }

  bool operator==(const UnitVector& other) const { return v_ == other.v_; }

 private:
  Eigen::Vector3d v_;
};

/// Vector in the tangent plane at `base`. The constructor removes any
/// component along the base point.
struct TangentVector {
  UnitVector base;
  Eigen::Vector3d vec = Eigen::Vector3d::Zero();

  TangentVector() = default;
  TangentVector(const UnitVector& b, const Eigen::Vector3d& v);
};

/// Great-circle distance in [0, pi].
double geodesic_distance(const UnitVector& y, const UnitVector& z);

UnitVector exp_map(const TangentVector& t);

/// Inverse of exp_map. Throws AntipodalPoint within 1e-6 of -base.
TangentVector log_map(const UnitVector& base, const UnitVector& y);

/// Orthonormal basis of the tangent plane at p: Gram-Schmidt of the
/// canonical axis least aligned with p, then the cross product.
std::pair<Eigen::Vector3d, Eigen::Vector3d> tangent_basis(const UnitVector& p);

struct SphereSolverOptions {
  double gradient_tolerance = 1e-9;
  int max_iterations = 200;
  double armijo = 1e-4;
  int max_halvings = 60;
};

struct SphereMeanDiagnostics {
  double objective = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  int starts_converged = 0;
};

/// Weighted Frechet mean on S^2 by Riemannian descent with Armijo
/// backtracking (Newton direction when the Hessian is positive definite on
/// the tangent plane, scaled gradient otherwise), started from the normalised
/// weighted Euclidean average and from the best data point; returns the
/// lowest converged objective.
UnitVector weighted_frechet_mean_sphere(const WeightVector& w, std::span<const UnitVector> ys,
                                        const SphereSolverOptions& options = {},
                                        SphereMeanDiagnostics* diagnostics = nullptr);

/// Gradient of n^{-1} sum_i w_i d^2(y_i, p) at p.
Eigen::Vector3d sphere_objective_gradient(const WeightVector& w, std::span<const UnitVector> ys,
                                          const UnitVector& p);

class SphereSpace {
 public:
  using Object = UnitVector;

  explicit SphereSpace(SphereSolverOptions options = {}) : options_(options) {}

  double distance(const Object& a, const Object& b) const { return geodesic_distance(a, b); }
  Object weighted_mean(const WeightVector& w, std::span<const Object> ys) const {
    return weighted_frechet_mean_sphere(w, ys, options_);
  }

 private:
  SphereSolverOptions options_;
};

static_assert(ObjectSpace<SphereSpace>);

// ---------------------------------------------------------------------------
// Spiral simulation

/// ((1 - x^2)^{1/2} cos(pi x), (1 - x^2)^{1/2} sin(pi x), x) for x in (0, 1).
UnitVector spiral_truth(double x);

struct SphereSample {
  Eigen::VectorXd x;
  std::vector<UnitVector> y;
  /// Tangent noise U_i at spiral_truth(x_i).
  std::vector<Eigen::Vector3d> noise;
};

/// X_i ~ U(0, 1); Y_i = Exp of bivariate N(0, noise_var I) tangent noise at
/// spiral_truth(X_i).
SphereSample simulate_sphere(int n, double noise_var, std::uint64_t seed);

/// Fitted curve for one simulated sample: (sample, bandwidth, x) -> estimate.
using SphereMethod = std::function<UnitVector(const SphereSample&, double, double)>;

/// Integral over xgrid of d^2(fit(x), spiral_truth(x)).
double integrated_squared_geodesic_error(const std::function<UnitVector(double)>& fit,
                                         const MidpointGrid& xgrid);

/// Mean over `runs` simulated samples of the integrated squared geodesic
/// error. Run r uses the seed derive_seed(seed, 0, r).
double mise(const SphereMethod& method, double bandwidth, int runs, int n, double noise_var,
            const MidpointGrid& xgrid, std::uint64_t seed);

SphereMethod local_frechet_method(Kernel kernel = {}, SphereSolverOptions options = {});
SphereMethod nadaraya_watson_method(Kernel kernel = {}, SphereSolverOptions options = {});

}  // namespace frechet

#endif  // FRECHET_SPHERE_HPP
