#include "frechet/hilbert.hpp"

#include <sstream>

#include <Eigen/Eigenvalues>

namespace frechet {

namespace {

void check_responses(const PredictorMatrix& X, std::size_t n, Eigen::Index dim_first,
                     const auto& dims) {
  if (static_cast<std::size_t>(X.n()) != n) throw Error(ErrorCode::ShapeMismatch, "predictor/response count mismatch");
  for (Eigen::Index d : dims)
    if (d != dim_first) throw Error(ErrorCode::ShapeMismatch, "responses differ in dimension");
}

struct LocalCoefficients {
  double c0;  // multiplies r0
  double c1;  // multiplies r1
};

LocalCoefficients local_coefficients(const PredictorMatrix& X, double x, double h, Kernel kernel) {
  const LocalMoments m = local_moments(X, x, h, kernel);
  const double s0 = m.sigma0_sq();
  if (!(s0 > 1e-12 * m.mu0 * m.mu2)) {
    std::ostringstream msg;
    msg << "degenerate local design at x = " << x << ", h = " << h << ": sigma0^2 = " << s0;
    throw Error(ErrorCode::BandwidthTooSmall, msg.str());
  }
  return {m.mu2 / s0, -m.mu1 / s0};
}

}  // namespace

Eigen::VectorXd closed_form_global(const PredictorMatrix& X, std::span<const Eigen::VectorXd> ys,
                                   const Eigen::VectorXd& x) {
  if (ys.empty()) throw Error(ErrorCode::ShapeMismatch, "no responses");
  const Eigen::Index m = ys.front().size();
  std::vector<Eigen::Index> dims;
  for (const auto& y : ys) dims.push_back(y.size());
  check_responses(X, ys.size(), m, dims);
  if (x.size() != X.p()) throw Error(ErrorCode::ShapeMismatch, "evaluation point has wrong dimension");

  const auto n = static_cast<double>(ys.size());
  Eigen::VectorXd ybar = Eigen::VectorXd::Zero(m);
  Eigen::MatrixXd gamma1 = Eigen::MatrixXd::Zero(X.p(), m);  // p x m
  for (std::size_t i = 0; i < ys.size(); ++i) {
    ybar += ys[i];
    gamma1 += (X.row(static_cast<Eigen::Index>(i)).transpose() - X.mean()) * ys[i].transpose();
  }
  ybar /= n;
  gamma1 /= n;
  Eigen::MatrixXd beta1(X.p(), m);
  for (Eigen::Index c = 0; c < m; ++c) beta1.col(c) = X.solve(gamma1.col(c));
  return ybar + beta1.transpose() * (x - X.mean());
}

Eigen::VectorXd closed_form_local(const PredictorMatrix& X, std::span<const Eigen::VectorXd> ys,
                                  double x, double h, Kernel kernel) {
  if (ys.empty()) throw Error(ErrorCode::ShapeMismatch, "no responses");
  const Eigen::Index m = ys.front().size();
  std::vector<Eigen::Index> dims;
  for (const auto& y : ys) dims.push_back(y.size());
  check_responses(X, ys.size(), m, dims);
  const LocalCoefficients c = local_coefficients(X, x, h, kernel);

  const auto n = static_cast<double>(ys.size());
  Eigen::VectorXd r0 = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd r1 = Eigen::VectorXd::Zero(m);
  for (std::size_t i = 0; i < ys.size(); ++i) {
    const double d = X.data()(static_cast<Eigen::Index>(i), 0) - x;
    const double k = kernel.scaled(d, h);
    if (k == 0.0) continue;
    r0 += k * ys[i];
    r1 += k * d * ys[i];
  }
  return (c.c0 * r0 + c.c1 * r1) / n;
}

SpdMatrix::SpdMatrix(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() == 0) throw Error(ErrorCode::NotPositiveDefinite, "matrix is not square");
  if (!m.allFinite()) throw Error(ErrorCode::NotPositiveDefinite, "non-finite entry");
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + m.cwiseAbs().maxCoeff()))
    throw Error(ErrorCode::NotPositiveDefinite, "matrix is not symmetric");
  m_ = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m_, Eigen::EigenvaluesOnly);
  if (!(eig.eigenvalues().minCoeff() > kEigenFloor)) {
    std::ostringstream msg;
    msg << "smallest eigenvalue " << eig.eigenvalues().minCoeff() << " is not above " << kEigenFloor;
    throw Error(ErrorCode::NotPositiveDefinite, msg.str());
  }
}

Eigen::MatrixXd spd_log(const SpdMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a.matrix());
  const Eigen::VectorXd logs = eig.eigenvalues().array().log();
  Eigen::MatrixXd out = eig.eigenvectors() * logs.asDiagonal() * eig.eigenvectors().transpose();
  return 0.5 * (out + out.transpose());
}

SpdMatrix sym_exp(const Eigen::MatrixXd& s) {
  const Eigen::MatrixXd sym = 0.5 * (s + s.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  const Eigen::VectorXd exps = eig.eigenvalues().array().exp();
  Eigen::MatrixXd out = eig.eigenvectors() * exps.asDiagonal() * eig.eigenvectors().transpose();
  return SpdMatrix(0.5 * (out + out.transpose()));
}

SpdMatrix log_euclidean_local(const PredictorMatrix& X, std::span<const SpdMatrix> ys, double x,
                              double h, Kernel kernel) {
  if (ys.empty()) throw Error(ErrorCode::ShapeMismatch, "no responses");
  const Eigen::Index r = ys.front().dim();
  std::vector<Eigen::Index> dims;
  for (const auto& y : ys) dims.push_back(y.dim());
  check_responses(X, ys.size(), r, dims);
  const LocalCoefficients c = local_coefficients(X, x, h, kernel);

  const auto n = static_cast<double>(ys.size());
  Eigen::MatrixXd r0 = Eigen::MatrixXd::Zero(r, r);
  Eigen::MatrixXd r1 = Eigen::MatrixXd::Zero(r, r);
  for (std::size_t i = 0; i < ys.size(); ++i) {
    const double d = X.data()(static_cast<Eigen::Index>(i), 0) - x;
    const double k = kernel.scaled(d, h);
    if (k == 0.0) continue;
    const Eigen::MatrixXd log_y = spd_log(ys[i]);
    r0 += k * log_y;
    r1 += k * d * log_y;
  }
  return sym_exp((c.c0 * r0 + c.c1 * r1) / n);
}

double LogEuclideanSpace::distance(const Object& a, const Object& b) const {
  if (a.dim() != b.dim()) throw Error(ErrorCode::ShapeMismatch, "matrices differ in dimension");
  return (spd_log(a) - spd_log(b)).norm();
}

LogEuclideanSpace::Object LogEuclideanSpace::weighted_mean(const WeightVector& w,
                                                           std::span<const Object> ys) const {
  check_weights(w, ys.size());
  const Eigen::Index r = ys.front().dim();
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(r, r);
  for (std::size_t i = 0; i < ys.size(); ++i) {
    if (ys[i].dim() != r) throw Error(ErrorCode::ShapeMismatch, "matrices differ in dimension");
    const double wi = w[static_cast<Eigen::Index>(i)];
    if (wi != 0.0) acc += wi * spd_log(ys[i]);
  }
  return sym_exp(acc / w.sum());
}

}  // namespace frechet
