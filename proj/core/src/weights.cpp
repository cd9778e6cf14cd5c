#include "frechet/weights.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "frechet/error.hpp"

namespace frechet {

namespace {

void require_scalar(const PredictorMatrix& X, const char* what) {
  if (X.p() != 1) {
    std::ostringstream msg;
    msg << what << " requires a scalar predictor, got p = " << X.p();
    throw Error(ErrorCode::ShapeMismatch, msg.str());
  }
}

void require_bandwidth(double h) {
  if (!(h > 0.0) || !std::isfinite(h))
    throw Error(ErrorCode::ParameterDomain, "bandwidth must be positive and finite");
}

}  // namespace

WeightVector uniform_weights(Eigen::Index n) {
  return {Eigen::VectorXd::Ones(n), WeightOrigin{WeightScheme::Uniform}};
}

WeightVector global_weights(const PredictorMatrix& X, const Eigen::VectorXd& x) {
  if (x.size() != X.p()) throw Error(ErrorCode::ShapeMismatch, "evaluation point has wrong dimension");
  if (!x.allFinite()) throw Error(ErrorCode::ParameterDomain, "evaluation point is not finite");
  const Eigen::VectorXd direction = X.solve(x - X.mean());
  const Eigen::MatrixXd centered = X.data().rowwise() - X.mean().transpose();
  WeightVector w;
  w.values = (centered * direction).array() + 1.0;
  w.origin = {WeightScheme::Global};
  return w;
}

LocalMoments local_moments(const PredictorMatrix& X, double x, double h, Kernel kernel) {
  require_scalar(X, "local smoothing");
  require_bandwidth(h);
  LocalMoments m;
  const auto col = X.data().col(0);
  for (Eigen::Index i = 0; i < col.size(); ++i) {
    const double d = col[i] - x;
    const double k = kernel.scaled(d, h);
    m.mu0 += k;
    m.mu1 += k * d;
    m.mu2 += k * d * d;
  }
  const auto n = static_cast<double>(col.size());
  m.mu0 /= n;
  m.mu1 /= n;
  m.mu2 /= n;
  return m;
}

WeightVector local_weights(const PredictorMatrix& X, double x, double h, Kernel kernel) {
  const LocalMoments m = local_moments(X, x, h, kernel);
  const auto col = X.data().col(0);

  std::set<double> distinct;
  for (Eigen::Index i = 0; i < col.size() && distinct.size() < 2; ++i)
    if (kernel.scaled(col[i] - x, h) > 0.0) distinct.insert(col[i]);

  const double s0 = m.sigma0_sq();
  if (distinct.size() < 2 || !(s0 > 1e-12 * m.mu0 * m.mu2)) {
    Eigen::Index in_window = 0;
    for (Eigen::Index i = 0; i < col.size(); ++i) in_window += kernel.scaled(col[i] - x, h) > 0.0;
    std::ostringstream msg;
    msg << "degenerate local design at x = " << x << ", h = " << h << ": " << in_window
        << " observation(s) in the kernel window, sigma0^2 = " << s0;
    throw Error(ErrorCode::BandwidthTooSmall, msg.str());
  }

  WeightVector w;
  w.values.resize(col.size());
  for (Eigen::Index i = 0; i < col.size(); ++i) {
    const double d = col[i] - x;
    w.values[i] = kernel.scaled(d, h) * (m.mu2 - m.mu1 * d) / s0;
  }
  w.origin = {WeightScheme::Local, h, kernel.shape()};
  return w;
}

WeightVector nw_weights(const PredictorMatrix& X, double x, double h, Kernel kernel) {
  require_scalar(X, "Nadaraya-Watson smoothing");
  require_bandwidth(h);
  const auto col = X.data().col(0);
  WeightVector w;
  w.values.resize(col.size());
  for (Eigen::Index i = 0; i < col.size(); ++i) w.values[i] = kernel.scaled(col[i] - x, h);
  const double total = w.values.sum();
  if (!(total > 0.0)) {
    std::ostringstream msg;
    msg << "no observation inside the kernel window at x = " << x << ", h = " << h;
    throw Error(ErrorCode::EmptyWindow, msg.str());
  }
  w.values *= static_cast<double>(col.size()) / total;
  w.origin = {WeightScheme::NadarayaWatson, h, kernel.shape()};
  return w;
}

}  // namespace frechet
