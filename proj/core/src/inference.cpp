#include "frechet/inference.hpp"

namespace frechet {

double adjusted_r2(double r2, Eigen::Index n, Eigen::Index q) {
  if (n - q - 1 <= 0) throw Error(ErrorCode::ParameterDomain, "adjusted R^2 needs n > q + 1");
  return r2 - (1.0 - r2) * static_cast<double>(q) / static_cast<double>(n - q - 1);
}

double permutation_p_value(double observed, std::span<const double> null_stats) {
  const auto exceed = std::count_if(null_stats.begin(), null_stats.end(),
                                    [observed](double s) { return s >= observed; });
  return (1.0 + static_cast<double>(exceed)) / (static_cast<double>(null_stats.size()) + 1.0);
}

std::vector<Eigen::Index> random_permutation(Eigen::Index n, std::uint64_t seed) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Rng rng = make_rng(seed);
  for (std::size_t i = order.size(); i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(order[i - 1], order[pick(rng)]);
  }
  return order;
}

std::vector<std::vector<Eigen::Index>> make_folds(Eigen::Index n, int k, std::uint64_t seed) {
  if (k < 1 || k > n) throw Error(ErrorCode::ParameterDomain, "fold count must be in [1, n]");
  const auto order = random_permutation(n, seed);
  std::vector<std::vector<Eigen::Index>> folds(static_cast<std::size_t>(k));
  const Eigen::Index base = n / k;
  const Eigen::Index extra = n % k;
  std::size_t pos = 0;
  for (int f = 0; f < k; ++f) {
    const Eigen::Index size = base + (f < extra ? 1 : 0);
    for (Eigen::Index j = 0; j < size; ++j) folds[static_cast<std::size_t>(f)].push_back(order[pos++]);
  }
  return folds;
}

}  // namespace frechet
