#include "frechet/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace frechet {

namespace {

Eigen::MatrixXd project_psd(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
  const Eigen::VectorXd clipped = eig.eigenvalues().cwiseMax(0.0);
  Eigen::MatrixXd out = eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().transpose();
  return 0.5 * (out + out.transpose());
}

double min_eigenvalue(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

void require_same_dim(Eigen::Index a, Eigen::Index b) {
  if (a != b) {
    std::ostringstream msg;
    msg << "matrix dimensions differ: " << a << " vs " << b;
    throw Error(ErrorCode::ShapeMismatch, msg.str());
  }
}

}  // namespace

SymMatrix::SymMatrix(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw Error(ErrorCode::ShapeMismatch, "matrix is not square");
  if (!m.allFinite()) throw Error(ErrorCode::ParameterDomain, "non-finite matrix entry");
  m_ = 0.5 * (m + m.transpose());
}

std::string correlation_violation(const Eigen::MatrixXd& m) {
  std::ostringstream msg;
  if (m.rows() != m.cols() || m.rows() == 0) return "matrix is not square and non-empty";
  if (!m.allFinite()) return "non-finite entry";
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12) return "matrix is not symmetric";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (m(i, i) != 1.0) {
      msg << "diagonal entry " << i << " is " << m(i, i);
      return msg.str();
    }
  }
  if (m.cwiseAbs().maxCoeff() > 1.0) return "off-diagonal entry outside [-1, 1]";
  const double lo = min_eigenvalue(0.5 * (m + m.transpose()));
  if (lo < CorrMatrix::kEigenTolerance) {
    msg << "smallest eigenvalue " << lo << " is negative";
    return msg.str();
  }
  return {};
}

CorrMatrix::CorrMatrix(const Eigen::MatrixXd& m) {
  if (auto why = correlation_violation(m); !why.empty())
    throw Error(ErrorCode::ParameterDomain, "not a correlation matrix: " + why);
  m_ = 0.5 * (m + m.transpose());
}

CorrMatrix CorrMatrix::from_upper_triangle(std::span<const double> entries, Eigen::Index r) {
  if (r < 1 || static_cast<Eigen::Index>(entries.size()) != r * (r - 1) / 2) {
    std::ostringstream msg;
    msg << "expected " << r * (r - 1) / 2 << " upper-triangle entries for r = " << r << ", got "
        << entries.size();
    throw Error(ErrorCode::DataFormat, msg.str());
  }
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(r, r);
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = i + 1; j < r; ++j) m(i, j) = m(j, i) = entries[k++];
  return CorrMatrix(m);
}

std::vector<double> CorrMatrix::upper_triangle() const {
  std::vector<double> out;
  for (Eigen::Index i = 0; i < dim(); ++i)
    for (Eigen::Index j = i + 1; j < dim(); ++j) out.push_back(m_(i, j));
  return out;
}

double frobenius_distance(const SymMatrix& a, const SymMatrix& b) {
  require_same_dim(a.dim(), b.dim());
  return (a.matrix() - b.matrix()).norm();
}

double frobenius_distance(const CorrMatrix& a, const CorrMatrix& b) {
  require_same_dim(a.dim(), b.dim());
  return (a.matrix() - b.matrix()).norm();
}

SymMatrix weighted_matrix_average(const WeightVector& w, std::span<const CorrMatrix> ys) {
  check_weights(w, ys.size());
  const Eigen::Index r = ys.front().dim();
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(r, r);
  for (std::size_t i = 0; i < ys.size(); ++i) {
    require_same_dim(ys[i].dim(), r);
    const double wi = w[static_cast<Eigen::Index>(i)];
    if (wi != 0.0) acc += wi * ys[i].matrix();
  }
  acc /= w.sum();
  acc.diagonal().setOnes();
  return SymMatrix(acc);
}

CorrMatrix nearest_correlation(const SymMatrix& b, const NearestCorrelationOptions& options) {
  const Eigen::Index r = b.dim();
  if (r == 0) throw Error(ErrorCode::ShapeMismatch, "empty matrix");

  if (correlation_violation(b.matrix()).empty()) return CorrMatrix(b.matrix(), CorrMatrix::Unchecked{});

  Eigen::MatrixXd y = b.matrix();
  Eigen::MatrixXd correction = Eigen::MatrixXd::Zero(r, r);
  Eigen::MatrixXd x;
  double residual = 0.0;
  bool converged = false;
  for (int it = 0; it < options.max_iterations; ++it) {
    const Eigen::MatrixXd shifted = y - correction;
    x = project_psd(shifted);
    correction = x - shifted;
    Eigen::MatrixXd next = x;
    next.diagonal().setOnes();
    residual = std::max((next - y).norm(), (next - x).norm());
    y = std::move(next);
    if (residual < options.tolerance) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    std::ostringstream msg;
    msg << "alternating projections did not converge in " << options.max_iterations
        << " iterations; residual " << residual;
    throw Error(ErrorCode::NonConvergence, msg.str());
  }

  // y has unit diagonal and sits within the tolerance of the PSD cone. Clip
  // the leftover negative spectrum and rescale so both constraints hold.
  if (min_eigenvalue(y) < 0.0) {
    Eigen::MatrixXd psd = project_psd(y);
    const Eigen::VectorXd scale = psd.diagonal().cwiseSqrt().cwiseInverse();
    y = scale.asDiagonal() * psd * scale.asDiagonal();
  }
  y = 0.5 * (y + y.transpose());
  y.diagonal().setOnes();
  y = y.cwiseMax(-1.0).cwiseMin(1.0);
  return CorrMatrix(std::move(y), CorrMatrix::Unchecked{});
}

CorrMatrix fit_correlation(const WeightVector& w, std::span<const CorrMatrix> ys,
                           const NearestCorrelationOptions& options) {
  return nearest_correlation(weighted_matrix_average(w, ys), options);
}

}  // namespace frechet
