#include "frechet/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "frechet/error.hpp"

namespace frechet {

double sample_quantile(std::vector<double> values, double prob) {
  if (values.empty()) throw Error(ErrorCode::ShapeMismatch, "quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double median(std::span<const double> values) {
  return sample_quantile(std::vector<double>(values.begin(), values.end()), 0.5);
}

Summary summarize(std::span<const double> values) {
  Summary s;
  s.count = values.size();
  if (values.empty()) return s;
  std::vector<double> v(values.begin(), values.end());
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  s.median = sample_quantile(v, 0.5);
  s.q1 = sample_quantile(v, 0.25);
  s.q3 = sample_quantile(v, 0.75);
  return s;
}

SignedRankResult wilcoxon_signed_rank(std::span<const double> differences, double zero_tolerance) {
  std::vector<double> d;
  for (double x : differences)
    if (std::abs(x) > zero_tolerance) d.push_back(x);
  SignedRankResult out;
  out.n_used = d.size();
  if (d.empty()) return out;

  std::vector<std::size_t> order(d.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return std::abs(d[a]) < std::abs(d[b]); });

  // Midranks for tied magnitudes.
  std::vector<double> rank(d.size());
  double tie_term = 0.0;
  bool ties = false;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && std::abs(d[order[j + 1]]) == std::abs(d[order[i]])) ++j;
    const double mid = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = mid;
    const auto t = static_cast<double>(j - i + 1);
    if (j > i) ties = true;
    tie_term += t * t * t - t;
    i = j + 1;
  }
  for (std::size_t i = 0; i < d.size(); ++i)
    if (d[i] > 0.0) out.statistic += rank[i];

  const auto n = static_cast<double>(d.size());
  const double mean = n * (n + 1.0) / 4.0;

  if (!ties && d.size() <= 25) {
    // counts[s] = number of sign patterns with positive-rank sum s.
    const auto max_sum = static_cast<std::size_t>(n * (n + 1.0) / 2.0);
    std::vector<double> counts(max_sum + 1, 0.0);
    counts[0] = 1.0;
    for (std::size_t r = 1; r <= d.size(); ++r)
      for (std::size_t s = max_sum; s >= r; --s) counts[s] += counts[s - r];
    const double total = std::pow(2.0, n);
    const auto w = static_cast<std::size_t>(std::llround(out.statistic));
    const std::size_t w_low = std::min(w, max_sum - w);
    double tail = 0.0;
    for (std::size_t s = 0; s <= w_low; ++s) tail += counts[s];
    out.p_value = std::min(1.0, 2.0 * tail / total);
    out.exact = true;
    return out;
  }

  const double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
  if (!(var > 0.0)) return out;
  const double diff = out.statistic - mean;
  const double corrected = std::max(0.0, std::abs(diff) - 0.5);
  const double z = corrected / std::sqrt(var);
  out.p_value = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  return out;
}

double log_log_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorCode::ShapeMismatch, "need >= 2 paired values");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      throw Error(ErrorCode::DegenerateResponse, "log-log slope needs strictly positive values");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]) - mx;
    sxx += lx * lx;
    sxy += lx * (std::log(y[i]) - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorCode::DegenerateResponse, "sample sizes must differ");
  return sxy / sxx;
}

}  // namespace frechet
