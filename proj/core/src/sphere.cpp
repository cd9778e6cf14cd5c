#include "frechet/sphere.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "frechet/random.hpp"

namespace frechet {

namespace {

constexpr double kAntipodalGuard = 1e-6;

double angle_between(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

// Log map without the antipodal check; returns zero for (near-)antipodal
// points, where the squared distance has no gradient.
Eigen::Vector3d log_unchecked(const Eigen::Vector3d& p, const Eigen::Vector3d& y, double theta) {
  if (theta == 0.0 || theta > std::numbers::pi - kAntipodalGuard) return Eigen::Vector3d::Zero();
  const Eigen::Vector3d u = y - p.dot(y) * p;
  const double norm = u.norm();
  if (norm == 0.0) return Eigen::Vector3d::Zero();
  return (theta / norm) * u;
}

Eigen::Vector3d exp_unchecked(const Eigen::Vector3d& p, const Eigen::Vector3d& v) {
  const double len = v.norm();
  if (len == 0.0) return p;
  return (std::cos(len) * p + (std::sin(len) / len) * v).normalized();
}

struct Objective {
  double value = 0.0;
  // sum_i |w_i| d_i^2 / n, the magnitude against which rounding is judged.
  double magnitude = 0.0;
};

class SphereObjective {
 public:
  SphereObjective(const WeightVector& w, std::span<const UnitVector> ys) {
    for (std::size_t i = 0; i < ys.size(); ++i) {
      const double wi = w[static_cast<Eigen::Index>(i)];
      if (wi == 0.0) continue;
      weights_.push_back(wi);
      points_.push_back(ys[i].coords());
    }
    inv_n_ = 1.0 / static_cast<double>(ys.size());
  }

  Objective operator()(const Eigen::Vector3d& p) const {
    Objective out;
    for (std::size_t i = 0; i < points_.size(); ++i) {
      const double theta = angle_between(p, points_[i]);
      out.value += weights_[i] * theta * theta;
      out.magnitude += std::abs(weights_[i]) * theta * theta;
    }
    out.value *= inv_n_;
    out.magnitude *= inv_n_;
    return out;
  }

  Eigen::Vector3d gradient(const Eigen::Vector3d& p) const {
    Eigen::Vector3d g = Eigen::Vector3d::Zero();
    for (std::size_t i = 0; i < points_.size(); ++i)
      g += weights_[i] * log_unchecked(p, points_[i], angle_between(p, points_[i]));
    g *= -2.0 * inv_n_;
    // Keep the gradient exactly tangent.
    return g - g.dot(p) * p;
  }

  const std::vector<Eigen::Vector3d>& points() const noexcept { return points_; }
  double inv_n() const noexcept { return inv_n_; }
  double total_weight() const noexcept {
    double t = 0.0;
    for (double w : weights_) t += w;
    return t;
  }
  const std::vector<double>& weights() const noexcept { return weights_; }

 private:
  std::vector<double> weights_;
  std::vector<Eigen::Vector3d> points_;
  double inv_n_ = 1.0;
};

struct Descent {
  Eigen::Vector3d point;
  double objective = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Newton direction from the Riemannian Hessian of n^{-1} sum_i w_i d^2(y_i, p):
// each term contributes 2 w_i [u u^T + theta cot(theta) (P - u u^T)] with u
// the unit log direction and P the tangent projector. Returns false when the
// Hessian is not positive definite on the tangent plane.
bool newton_direction(const SphereObjective& f, const Eigen::Vector3d& p, const Eigen::Vector3d& g,
                      Eigen::Vector3d& direction) {
  Eigen::Vector3d axis = Eigen::Vector3d::Unit(0);
  if (std::abs(p[0]) > 0.9) axis = Eigen::Vector3d::Unit(1);
  const Eigen::Vector3d e1 = (axis - axis.dot(p) * p).normalized();
  const Eigen::Vector3d e2 = p.cross(e1);

  Eigen::Matrix2d h = Eigen::Matrix2d::Zero();
  const auto& pts = f.points();
  const auto& ws = f.weights();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double theta = angle_between(p, pts[i]);
    if (theta > std::numbers::pi - kAntipodalGuard) continue;
    const Eigen::Vector3d v = log_unchecked(p, pts[i], theta);
    const double len = v.norm();
    const double tangential = theta < 1e-8 ? 1.0 : theta * std::cos(theta) / std::sin(theta);
    Eigen::Vector2d u(0.0, 0.0);
    if (len > 0.0) u = Eigen::Vector2d(v.dot(e1), v.dot(e2)) / len;
    const Eigen::Matrix2d radial = u * u.transpose();
    h += ws[i] * (radial + tangential * (Eigen::Matrix2d::Identity() - radial));
  }
  h *= 2.0 * f.inv_n();
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(h);
  const double lo = eig.eigenvalues()[0];
  const double hi = eig.eigenvalues()[1];
  if (!(lo > 1e-8 * std::max(1.0, hi))) return false;
  const Eigen::Vector2d g2(g.dot(e1), g.dot(e2));
  const Eigen::Vector2d step = -eig.eigenvectors() * (eig.eigenvalues().cwiseInverse().asDiagonal() *
                                                      (eig.eigenvectors().transpose() * g2));
  direction = step[0] * e1 + step[1] * e2;
  return true;
}

Descent descend(const SphereObjective& f, Eigen::Vector3d p, const SphereSolverOptions& opt) {
  Descent out;
  Objective fp = f(p);
  Eigen::Vector3d g = f.gradient(p);
  // Fallback scaling: the gradient of a unit-mass objective has curvature ~2.
  const double gradient_scale = 0.5 / std::max(f.total_weight() * f.inv_n(), 1e-12);
  int it = 0;
  for (; it < opt.max_iterations; ++it) {
    if (g.norm() < opt.gradient_tolerance) break;
    Eigen::Vector3d direction;
    if (!newton_direction(f, p, g, direction) || !(g.dot(direction) < 0.0)) direction = -gradient_scale * g;
    const double slope = g.dot(direction);
    const double slack = 16.0 * std::numeric_limits<double>::epsilon() * fp.magnitude;
    double step = 1.0;
    bool accepted = false;
    for (int h = 0; h < opt.max_halvings; ++h, step *= 0.5) {
      const Eigen::Vector3d q = exp_unchecked(p, step * direction);
      const Objective fq = f(q);
      if (fq.value <= fp.value + opt.armijo * step * slope + slack) {
        p = q;
        fp = fq;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    g = f.gradient(p);
  }
  out.point = p;
  out.objective = fp.value;
  out.gradient_norm = g.norm();
  out.iterations = it;
  out.converged = out.gradient_norm < opt.gradient_tolerance;
  return out;
}

}  // namespace

UnitVector::UnitVector(const Eigen::Vector3d& v) {
  const double norm = v.norm();
  if (!(norm > 0.0) || !v.allFinite()) throw Error(ErrorCode::ParameterDomain, "cannot normalise a zero or non-finite vector");
  v_ = v / norm;
}

TangentVector::TangentVector(const UnitVector& b, const Eigen::Vector3d& v) : base(b) {
  vec = v - v.dot(b.coords()) * b.coords();
}

double geodesic_distance(const UnitVector& y, const UnitVector& z) {
  // Equal to arccos(clamp(y.z)) but accurate for nearby and antipodal points.
  return angle_between(y.coords(), z.coords());
}

UnitVector exp_map(const TangentVector& t) {
  return UnitVector(exp_unchecked(t.base.coords(), t.vec));
}

TangentVector log_map(const UnitVector& base, const UnitVector& y) {
  const double theta = geodesic_distance(base, y);
  if (theta > std::numbers::pi - kAntipodalGuard) {
    std::ostringstream msg;
    msg << "log map undefined: points are " << theta << " apart (antipodal within " << kAntipodalGuard << ")";
    throw Error(ErrorCode::AntipodalPoint, msg.str());
  }
  TangentVector t;
  t.base = base;
  t.vec = log_unchecked(base.coords(), y.coords(), theta);
  return t;
}

std::pair<Eigen::Vector3d, Eigen::Vector3d> tangent_basis(const UnitVector& p) {
  const Eigen::Vector3d& v = p.coords();
  Eigen::Index axis = 0;
  v.cwiseAbs().minCoeff(&axis);
  Eigen::Vector3d e = Eigen::Vector3d::Unit(axis);
  const Eigen::Vector3d first = (e - e.dot(v) * v).normalized();
  const Eigen::Vector3d second = v.cross(first);
  return {first, second};
}

Eigen::Vector3d sphere_objective_gradient(const WeightVector& w, std::span<const UnitVector> ys,
                                          const UnitVector& p) {
  check_weights(w, ys.size());
  return SphereObjective(w, ys).gradient(p.coords());
}

UnitVector weighted_frechet_mean_sphere(const WeightVector& w, std::span<const UnitVector> ys,
                                        const SphereSolverOptions& options,
                                        SphereMeanDiagnostics* diagnostics) {
  check_weights(w, ys.size());
  const SphereObjective f(w, ys);

  std::vector<Eigen::Vector3d> starts;
  Eigen::Vector3d avg = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < f.points().size(); ++i) avg += f.weights()[i] * f.points()[i];
  if (avg.norm() > 1e-6) starts.push_back(avg.normalized());

  double best_data = std::numeric_limits<double>::infinity();
  Eigen::Vector3d best_point = f.points().front();
  for (const auto& y : f.points()) {
    const double v = f(y).value;
    if (v < best_data) {
      best_data = v;
      best_point = y;
    }
  }
  starts.push_back(best_point);

  Descent best;
  bool found = false;
  int converged = 0;
  std::ostringstream trace;
  for (const auto& s : starts) {
    Descent d = descend(f, s, options);
    trace << " [start " << s.transpose() << ": objective " << d.objective << ", |grad| "
          << d.gradient_norm << ", " << d.iterations << " iterations]";
    if (!d.converged) continue;
    ++converged;
    if (!found || d.objective < best.objective) {
      best = d;
      found = true;
    }
  }
  if (!found)
    throw Error(ErrorCode::NonConvergence, "no start of the spherical mean solver converged:" + trace.str());
  if (diagnostics) {
    diagnostics->objective = best.objective;
    diagnostics->gradient_norm = best.gradient_norm;
    diagnostics->iterations = best.iterations;
    diagnostics->starts_converged = converged;
  }
  return UnitVector(best.point);
}

// ---------------------------------------------------------------------------

UnitVector spiral_truth(double x) {
  if (!(x > 0.0 && x < 1.0)) {
    std::ostringstream msg;
    msg << "spiral is defined on (0, 1), got x = " << x;
    throw Error(ErrorCode::ParameterDomain, msg.str());
  }
  const double r = std::sqrt(1.0 - x * x);
  return UnitVector(r * std::cos(std::numbers::pi * x), r * std::sin(std::numbers::pi * x), x);
}

SphereSample simulate_sphere(int n, double noise_var, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorCode::ParameterDomain, "sample size must be positive");
  if (!(noise_var > 0.0)) throw Error(ErrorCode::ParameterDomain, "noise variance must be positive");
  Rng rng = make_rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, std::sqrt(noise_var));

  SphereSample s;
  s.x.resize(n);
  s.y.reserve(static_cast<std::size_t>(n));
  s.noise.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double x = unif(rng);
    while (x == 0.0) x = unif(rng);
    const UnitVector base = spiral_truth(x);
    const auto [e1, e2] = tangent_basis(base);
    const double a = normal(rng);
    const double b = normal(rng);
    const Eigen::Vector3d u = a * e1 + b * e2;
    s.x[i] = x;
    s.noise.push_back(u);
    s.y.push_back(UnitVector(exp_unchecked(base.coords(), u)));
  }
  return s;
}

double integrated_squared_geodesic_error(const std::function<UnitVector(double)>& fit,
                                         const MidpointGrid& xgrid) {
  return xgrid.integrate([&](double x) {
    const double d = geodesic_distance(fit(x), spiral_truth(x));
    return d * d;
  });
}

double mise(const SphereMethod& method, double bandwidth, int runs, int n, double noise_var,
            const MidpointGrid& xgrid, std::uint64_t seed) {
  if (runs < 1) throw Error(ErrorCode::ParameterDomain, "runs must be positive");
  double total = 0.0;
  for (int r = 0; r < runs; ++r) {
    const SphereSample sample = simulate_sphere(n, noise_var, derive_seed(seed, 0, static_cast<std::uint64_t>(r)));
    total += integrated_squared_geodesic_error(
        [&](double x) { return method(sample, bandwidth, x); }, xgrid);
  }
  return total / runs;
}

SphereMethod local_frechet_method(Kernel kernel, SphereSolverOptions options) {
  return [kernel, options](const SphereSample& s, double h, double x) {
    const auto X = PredictorMatrix(Eigen::MatrixXd(s.x));
    return weighted_frechet_mean_sphere(local_weights(X, x, h, kernel), s.y, options);
  };
}

SphereMethod nadaraya_watson_method(Kernel kernel, SphereSolverOptions options) {
  return [kernel, options](const SphereSample& s, double h, double x) {
    const auto X = PredictorMatrix(Eigen::MatrixXd(s.x));
    return weighted_frechet_mean_sphere(nw_weights(X, x, h, kernel), s.y, options);
  };
}

}  // namespace frechet
