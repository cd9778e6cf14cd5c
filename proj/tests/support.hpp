// Independent reference computations shared by the unit and acceptance
// tests. Nothing here calls the library's weight or solver code.
#ifndef FRECHET_TESTS_SUPPORT_HPP
#define FRECHET_TESTS_SUPPORT_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace support {

using Rng = std::mt19937_64;

inline Eigen::MatrixXd gaussian_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> z(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = z(rng);
  return m;
}

inline Eigen::VectorXd uniform_vector(Rng& rng, Eigen::Index size, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::VectorXd v(size);
  for (Eigen::Index i = 0; i < size; ++i) v[i] = u(rng);
  return v;
}

/// Design matrix [1, X].
inline Eigen::MatrixXd with_intercept(const Eigen::MatrixXd& X) {
  Eigen::MatrixXd d(X.rows(), X.cols() + 1);
  d.col(0).setOnes();
  d.rightCols(X.cols()) = X;
  return d;
}

/// OLS prediction at x for every response column, via QR of [1, X].
inline Eigen::VectorXd ols_predict(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, const Eigen::VectorXd& x) {
  const Eigen::MatrixXd coef = with_intercept(X).colPivHouseholderQr().solve(Y);
  Eigen::RowVectorXd row(x.size() + 1);
  row << 1.0, x.transpose();
  return (row * coef).transpose();
}

/// Classical multiple R^2 summed over response columns.
inline double classical_r2(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y) {
  const Eigen::MatrixXd D = with_intercept(X);
  const Eigen::MatrixXd fitted = D * D.colPivHouseholderQr().solve(Y);
  const Eigen::RowVectorXd mean = Y.colwise().mean();
  const double rss = (Y - fitted).squaredNorm();
  const double tss = (Y.rowwise() - mean).squaredNorm();
  return 1.0 - rss / tss;
}

inline double epanechnikov(double u) { return std::abs(u) <= 1.0 ? 0.75 * (1.0 - u * u) : 0.0; }

/// Intercept of the kernel-weighted least squares line of y on (x_i - x0):
/// the textbook local linear estimator, solved from its 2x2 normal equations.
inline Eigen::VectorXd local_linear(const Eigen::VectorXd& xs, const Eigen::MatrixXd& Y, double x0, double h) {
  Eigen::Matrix2d A = Eigen::Matrix2d::Zero();
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(2, Y.cols());
  for (Eigen::Index i = 0; i < xs.size(); ++i) {
    const double d = xs[i] - x0;
    const double k = epanechnikov(d / h);
    if (k == 0.0) continue;
    const Eigen::Vector2d z(1.0, d);
    A += k * z * z.transpose();
    b += k * z * Y.row(i);
  }
  return A.ldlt().solve(b).row(0).transpose();
}

/// Exact isotonic regression by exhaustive search over contiguous block
/// partitions: the optimum is constant on blocks at the block means.
inline std::vector<double> isotonic_exhaustive(const std::vector<double>& g) {
  const int m = static_cast<int>(g.size());
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> best_q;
  for (unsigned cuts = 0; cuts < (1u << (m - 1)); ++cuts) {
    std::vector<double> q(g.size());
    int start = 0;
    for (int j = 0; j < m; ++j) {
      const bool end = j == m - 1 || (cuts & (1u << j));
      if (!end) continue;
      double s = 0.0;
      for (int t = start; t <= j; ++t) s += g[static_cast<std::size_t>(t)];
      for (int t = start; t <= j; ++t) q[static_cast<std::size_t>(t)] = s / (j - start + 1);
      start = j + 1;
    }
    if (!std::is_sorted(q.begin(), q.end())) continue;
    double obj = 0.0;
    for (int j = 0; j < m; ++j) obj += (q[j] - g[j]) * (q[j] - g[j]);
    if (obj < best) {
      best = obj;
      best_q = q;
    }
  }
  return best_q;
}

inline Eigen::MatrixXd psd_part(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
  const Eigen::VectorXd lam = eig.eigenvalues().cwiseMax(0.0);
  return eig.eigenvectors() * lam.asDiagonal() * eig.eigenvectors().transpose();
}

/// Nearest correlation matrix by gradient ascent on the dual
///   max_y  1^T y - 1/2 ||(B + diag y)_+||^2,
/// whose gradient 1 - diag((B + diag y)_+) is 1-Lipschitz, so unit steps
/// converge. The primal solution is (B + diag y)_+.
inline Eigen::MatrixXd nearest_correlation_dual(const Eigen::MatrixXd& b, int max_iterations = 200000,
                                                double tolerance = 1e-13) {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(b.rows());
  Eigen::MatrixXd x = b;
  for (int it = 0; it < max_iterations; ++it) {
    x = psd_part(b + Eigen::MatrixXd(y.asDiagonal()));
    const Eigen::VectorXd grad = Eigen::VectorXd::Ones(b.rows()) - x.diagonal();
    if (grad.norm() < tolerance) break;
    y += grad;
  }
  return x;
}

/// Random valid correlation matrix: normalised Gram matrix of random vectors.
inline Eigen::MatrixXd random_correlation(Rng& rng, Eigen::Index r, Eigen::Index rank = -1) {
  if (rank < 1) rank = r + 2;
  const Eigen::MatrixXd g = gaussian_matrix(rng, r, rank);
  Eigen::MatrixXd c = g * g.transpose();
  const Eigen::VectorXd d = c.diagonal().cwiseSqrt().cwiseInverse();
  c = (d.asDiagonal() * c * d.asDiagonal()).cwiseMax(-1.0).cwiseMin(1.0);
  c.diagonal().setOnes();
  return c;
}

/// Random rotation of R^3 from a normalised Gaussian quaternion.
inline Eigen::Matrix3d random_rotation(Rng& rng) {
  std::normal_distribution<double> z(0.0, 1.0);
  Eigen::Quaterniond q(z(rng), z(rng), z(rng), z(rng));
  q.normalize();
  return q.toRotationMatrix();
}

}  // namespace support

#endif  // FRECHET_TESTS_SUPPORT_HPP
