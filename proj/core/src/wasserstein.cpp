#include "frechet/wasserstein.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/distributions/normal.hpp>

#include "frechet/random.hpp"

namespace frechet {

QuantileGrid::QuantileGrid(int size) {
  if (size < 1) throw Error(ErrorCode::ParameterDomain, "quantile grid needs at least one level");
  levels_.resize(static_cast<std::size_t>(size));
  auto scores = std::make_shared<std::vector<double>>(levels_.size());
  const boost::math::normal standard;
  for (int j = 0; j < size; ++j) {
    levels_[static_cast<std::size_t>(j)] = (j + 0.5) / size;
    (*scores)[static_cast<std::size_t>(j)] = boost::math::quantile(standard, levels_[static_cast<std::size_t>(j)]);
  }
  scores_ = std::move(scores);
}

QuantileFunction::QuantileFunction(Eigen::VectorXd values) : values_(std::move(values)) {
  if (values_.size() == 0) throw Error(ErrorCode::ParameterDomain, "empty quantile function");
  if (!values_.allFinite()) throw Error(ErrorCode::ParameterDomain, "non-finite quantile value");
  for (Eigen::Index j = 0; j + 1 < values_.size(); ++j) {
    if (values_[j] > values_[j + 1] + kMonotoneTolerance) {
      std::ostringstream msg;
      msg << "quantile values decrease at index " << j << " (" << values_[j] << " > "
          << values_[j + 1] << ")";
      throw Error(ErrorCode::ParameterDomain, msg.str());
    }
  }
}

double wasserstein_distance(const QuantileFunction& q1, const QuantileFunction& q2) {
  if (q1.size() != q2.size()) {
    std::ostringstream msg;
    msg << "quantile grids differ: " << q1.size() << " vs " << q2.size() << " levels";
    throw Error(ErrorCode::GridMismatch, msg.str());
  }
  return std::sqrt((q1.values() - q2.values()).squaredNorm() / q1.size());
}

Eigen::VectorXd weighted_quantile_average(const WeightVector& w, std::span<const QuantileFunction> qs) {
  check_weights(w, qs.size());
  const int m = qs.front().size();
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(m);
  for (std::size_t i = 0; i < qs.size(); ++i) {
    if (qs[i].size() != m) throw Error(ErrorCode::GridMismatch, "quantile functions on different grids");
    const double wi = w[static_cast<Eigen::Index>(i)];
    if (wi != 0.0) acc.noalias() += wi * qs[i].values();
  }
  return acc / w.sum();
}

QuantileFunction isotonic_projection(const Eigen::VectorXd& g) {
  if (g.size() == 0) throw Error(ErrorCode::ParameterDomain, "empty input to isotonic projection");
  if (!g.allFinite()) throw Error(ErrorCode::ParameterDomain, "non-finite input to isotonic projection");

  // Blocks on a stack: running sum and size. Only strict violators are pooled,
  // so a nondecreasing input comes back bit-for-bit.
  std::vector<double> sums;
  std::vector<Eigen::Index> sizes;
  sums.reserve(static_cast<std::size_t>(g.size()));
  sizes.reserve(static_cast<std::size_t>(g.size()));
  for (Eigen::Index j = 0; j < g.size(); ++j) {
    double sum = g[j];
    Eigen::Index size = 1;
    while (!sums.empty() && sums.back() * static_cast<double>(size) > sum * static_cast<double>(sizes.back())) {
      sum += sums.back();
      size += sizes.back();
      sums.pop_back();
      sizes.pop_back();
    }
    sums.push_back(sum);
    sizes.push_back(size);
  }

  Eigen::VectorXd out(g.size());
  Eigen::Index pos = 0;
  for (std::size_t b = 0; b < sums.size(); ++b) {
    out.segment(pos, sizes[b]).setConstant(sums[b] / static_cast<double>(sizes[b]));
    pos += sizes[b];
  }
  // Block means can tie or invert by one ulp after division; enforce order.
  for (Eigen::Index j = 1; j < out.size(); ++j) out[j] = std::max(out[j], out[j - 1]);
  return QuantileFunction(std::move(out), QuantileFunction::Unchecked{});
}

QuantileFunction fit_distribution(const WeightVector& w, std::span<const QuantileFunction> qs) {
  return isotonic_projection(weighted_quantile_average(w, qs));
}

// ---------------------------------------------------------------------------

void DistributionModel::validate() const {
  const double lo = sigma0 - std::abs(gamma);
  if (!(lo > 0.0)) {
    std::ostringstream msg;
    msg << "sigma0 + gamma x must be positive on [-1, 1]; minimum is " << lo;
    throw Error(ErrorCode::ParameterDomain, msg.str());
  }
  if (!(v1 >= 0.0) || !(v2 >= 0.0)) throw Error(ErrorCode::ParameterDomain, "variances must be >= 0");
  if (l < 1) throw Error(ErrorCode::ParameterDomain, "transport range l must be >= 1");
}

QuantileFunction DistributionModel::truth(double x, const QuantileGrid& grid) const {
  const auto z = grid.normal_scores();
  Eigen::VectorXd q(grid.size());
  const double loc = mu0 + beta * x;
  const double scale = sigma0 + gamma * x;
  for (int j = 0; j < grid.size(); ++j) q[j] = loc + scale * z[static_cast<std::size_t>(j)];
  return QuantileFunction(std::move(q));
}

double transport_map(int k, double x) {
  return x - std::sin(k * x) / std::abs(k);
}

namespace {

WassersteinSample simulate(int n, const DistributionModel& model, const QuantileGrid& grid,
                           std::uint64_t seed, bool transport) {
  if (n < 1) throw Error(ErrorCode::ParameterDomain, "sample size must be positive");
  model.validate();
  Rng rng = make_rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, 2 * model.l - 1);

  WassersteinSample s;
  s.x.resize(n);
  s.y.reserve(static_cast<std::size_t>(n));
  s.mu.resize(static_cast<std::size_t>(n));
  s.sigma.resize(static_cast<std::size_t>(n));
  s.k.assign(static_cast<std::size_t>(n), 0);
  const auto z = grid.normal_scores();

  for (int i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const double x = unif(rng);
    const double scale = model.sigma0 + model.gamma * x;
    const double mu = model.mu0 + model.beta * x + std::sqrt(model.v1) * normal(rng);
    double sigma = scale;
    if (model.v2 > 0.0) {
      std::gamma_distribution<double> gamma(scale * scale / model.v2, model.v2 / scale);
      sigma = gamma(rng);
    }
    int k = 0;
    if (transport) {
      const int draw = pick(rng);
      k = draw < model.l ? draw - model.l : draw - model.l + 1;
    }

    Eigen::VectorXd q(grid.size());
    for (int j = 0; j < grid.size(); ++j) {
      const double v = mu + sigma * z[static_cast<std::size_t>(j)];
      q[j] = transport ? transport_map(k, v) : v;
    }
    s.x[i] = x;
    s.mu[ui] = mu;
    s.sigma[ui] = sigma;
    s.k[ui] = k;
    s.y.emplace_back(std::move(q));
  }
  return s;
}

}  // namespace

WassersteinSample simulate_setting1(int n, const DistributionModel& model, const QuantileGrid& grid,
                                    std::uint64_t seed) {
  return simulate(n, model, grid, seed, false);
}

WassersteinSample simulate_setting2(int n, const DistributionModel& model, const QuantileGrid& grid,
                                    std::uint64_t seed) {
  return simulate(n, model, grid, seed, true);
}

double ise(const std::function<QuantileFunction(double)>& fit,
           const std::function<QuantileFunction(double)>& truth, const MidpointGrid& xgrid) {
  return xgrid.integrate([&](double x) {
    const double d = wasserstein_distance(fit(x), truth(x));
    return d * d;
  });
}

// ---------------------------------------------------------------------------

namespace {

double sum_squares(std::span<const double> x, std::span<const double> y, const Line& line) {
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - line(x[i]);
    total += r * r;
  }
  return total;
}

Line ols_line(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorCode::CovarianceSingular, "constant predictor in line fit");
  const double b = sxy / sxx;
  return {my - b * mx, b};
}

// Least squares line through the point (x0, c).
Line line_through(std::span<const double> x, std::span<const double> y, double x0, double c) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += (x[i] - x0) * (y[i] - c);
    den += (x[i] - x0) * (x[i] - x0);
  }
  const double b = den > 0.0 ? num / den : 0.0;
  return {c - b * x0, b};
}

}  // namespace

Line constrained_positive_line(std::span<const double> x, std::span<const double> y, double floor) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorCode::ShapeMismatch, "need >= 2 paired values");
  const auto feasible = [floor](const Line& l) {
    const double slack = 1e-12 * (1.0 + std::abs(floor));
    return l(-1.0) >= floor - slack && l(1.0) >= floor - slack;
  };
  const Line free = ols_line(x, y);
  if (feasible(free)) return free;

  const Line candidates[] = {line_through(x, y, -1.0, floor), line_through(x, y, 1.0, floor),
                             Line{floor, 0.0}};
  Line best{};
  double best_obj = std::numeric_limits<double>::infinity();
  for (const Line& c : candidates) {
    if (!feasible(c)) continue;
    const double obj = sum_squares(x, y, c);
    if (obj < best_obj) {
      best_obj = obj;
      best = c;
    }
  }
  return best;
}

OracleRegression::OracleRegression(const WassersteinSample& sample, QuantileGrid grid)
    : grid_(std::move(grid)) {
  if (sample.mu.size() != static_cast<std::size_t>(sample.x.size()) || sample.sigma.size() != sample.mu.size())
    throw Error(ErrorCode::ShapeMismatch, "latent parameters missing from sample");
  const std::span<const double> xs(sample.x.data(), static_cast<std::size_t>(sample.x.size()));
  location_ = ols_line(xs, sample.mu);
  scale_ = constrained_positive_line(xs, sample.sigma);
}

QuantileFunction OracleRegression::operator()(double x) const {
  const auto z = grid_.normal_scores();
  const double loc = location_(x);
  const double scale = scale_(x);
  Eigen::VectorXd q(grid_.size());
  for (int j = 0; j < grid_.size(); ++j) q[j] = loc + scale * z[static_cast<std::size_t>(j)];
  return QuantileFunction(std::move(q));
}

OracleRegression oracle_regression_setting1(const WassersteinSample& sample, const QuantileGrid& grid) {
  return OracleRegression(sample, grid);
}

}  // namespace frechet
