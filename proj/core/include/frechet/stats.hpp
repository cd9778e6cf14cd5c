#ifndef FRECHET_STATS_HPP
#define FRECHET_STATS_HPP

#include <span>
#include <vector>

namespace frechet {

/// Sample quantile with linear interpolation between order statistics
/// (Hyndman-Fan type 7, the R default).
double sample_quantile(std::vector<double> values, double prob);
double median(std::span<const double> values);

struct Summary {
  std::size_t count = 0;
  double mean = 0.0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
};

Summary summarize(std::span<const double> values);

struct SignedRankResult {
  /// Sum of ranks of the positive differences.
  double statistic = 0.0;
  /// Differences left after dropping zeros.
  std::size_t n_used = 0;
  double p_value = 1.0;
  bool exact = false;
};

/// Two-sided Wilcoxon signed-rank test of zero median difference. Differences
/// with |d| <= zero_tolerance are dropped. Exact null distribution for up to
/// 25 untied differences, normal approximation with tie and continuity
/// corrections otherwise.
SignedRankResult wilcoxon_signed_rank(std::span<const double> differences, double zero_tolerance = 0.0);

/// Least squares slope of log(y) on log(x).
double log_log_slope(std::span<const double> x, std::span<const double> y);

}  // namespace frechet

#endif  // FRECHET_STATS_HPP
