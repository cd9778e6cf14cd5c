#ifndef FRECHET_EXPERIMENT_HPP
#define FRECHET_EXPERIMENT_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "frechet/parallel.hpp"
#include "frechet/quadrature.hpp"
#include "frechet/random.hpp"
#include "frechet/stats.hpp"
#include "frechet/wasserstein.hpp"

namespace frechet {

/// One simulation study. Serialises to JSON with the same field names.
struct ExperimentConfig {
  std::string space = "wasserstein";  // wasserstein | sphere
  std::string preset;                 // informational
  int setting = 1;                    // wasserstein generator: 1 or 2
  std::vector<std::string> methods = {"global", "oracle", "nw"};
  std::vector<int> sample_sizes = {50, 100, 200};
  int runs = 200;
  std::uint64_t seed = 1;
  int grid_size = QuantileGrid::kDefaultSize;
  DistributionModel model;
  double noise_var = 0.04;
  std::vector<double> bandwidths;
  std::string kernel = "epanechnikov";
  MidpointGrid x_grid{-1.0, 1.0, 50};

  /// Throws ParameterDomain on inconsistent or non-positive fields.
  void validate() const;

  bool operator==(const ExperimentConfig&) const = default;
};

nlohmann::json to_json(const ExperimentConfig& config);
/// Missing fields keep their defaults; unknown fields are rejected.
ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig base = {});

/// Named parameter sets: setting1, setting2, table1-low, table1-high.
ExperimentConfig preset_config(const std::string& name);
std::vector<std::string> preset_names();

/// Evenly spaced values from `first` to `last` inclusive.
std::vector<double> linear_grid(double first, double last, int count);

struct RunRecord {
  std::string method;
  int n = 0;
  int run = 0;
  /// NaN for methods without a bandwidth.
  double bandwidth = std::nan("");
  /// Integrated squared error of this run; NaN when the fit failed.
  double error = std::nan("");
  bool ok = true;
  std::string diagnostics;
  /// Informational; excluded from same_outcome.
  double wall_ms = 0.0;

  /// Equality of every deterministic field (everything except wall time).
  bool same_outcome(const RunRecord& other) const;
};

nlohmann::json to_json(const RunRecord& record);

struct GroupSummary {
  std::string method;
  int n = 0;
  double bandwidth = std::nan("");
  std::size_t failures = 0;
  Summary stats;  // over successful runs; stats.mean is the MISE
};

struct ExperimentResult {
  ExperimentConfig config;
  /// Ordered by sample size, then run, then method and bandwidth.
  std::vector<RunRecord> records;
  /// One entry per (method, n, bandwidth).
  std::vector<GroupSummary> groups;
  /// Per (method, n): the bandwidth with the smallest mean error among those
  /// without failures (the only group for bandwidth-free methods).
  std::vector<GroupSummary> best;

  const GroupSummary* find_best(const std::string& method, int n) const;
  /// Per-run errors of one group, ordered by run.
  std::vector<double> errors(const std::string& method, int n, double bandwidth = std::nan("")) const;
};

/// Wasserstein simulation (settings 1 and 2): global Frechet regression,
/// the parametric oracle (setting 1) and Nadaraya-Watson over the bandwidth
/// grid, each scored by ISE over x_grid.
ExperimentResult run_wasserstein_experiment(const ExperimentConfig& config);

/// Spiral-on-the-sphere simulation: local Frechet ("local") and
/// Nadaraya-Watson ("nw") over the bandwidth grid, scored by integrated
/// squared geodesic error over x_grid.
ExperimentResult run_sphere_experiment(const ExperimentConfig& config);

ExperimentResult run_experiment(const ExperimentConfig& config);

/// Recomputes groups and best from records.
void summarize_records(ExperimentResult& result);

void write_records_ndjson(const ExperimentResult& result, std::ostream& out);
/// method,n,bandwidth,runs,failures,mean,median,q1,q3[,mean_x100]
void write_group_csv(const ExperimentResult& result, std::ostream& out, bool best_only = false);

// ---------------------------------------------------------------------------
// Convergence rate check

struct RateCheckResult {
  std::vector<int> sample_sizes;
  std::vector<double> median_error;
  double slope = 0.0;
};

/// Least squares slope of log median error against log n. error_for(n, seed)
/// returns the error of one run; run r at size n gets
/// derive_seed(seed, n, r). Throws DegenerateResponse when a median error is
/// zero (slope undefined).
RateCheckResult rate_check(const std::function<double(int, std::uint64_t)>& error_for,
                           const std::vector<int>& sample_sizes, int runs, std::uint64_t seed);

struct RateCheckConfig {
  std::string space = "euclidean";  // euclidean | wasserstein
  std::vector<int> sample_sizes = {50, 200, 800};
  int runs = 100;
  std::uint64_t seed = 1;
  int setting = 2;  // wasserstein generator
  int grid_size = QuantileGrid::kDefaultSize;
  MidpointGrid x_grid{-1.0, 1.0, 50};
};

/// Global Frechet regression on the Euclidean linear model
/// Y = a + b X + N(0, 0.25 I) in R^3, or on the Wasserstein generator, with
/// the ISE over x_grid as the per-run error.
RateCheckResult run_rate_check(const RateCheckConfig& config);

nlohmann::json to_json(const RateCheckResult& result);

}  // namespace frechet

#endif  // FRECHET_EXPERIMENT_HPP
