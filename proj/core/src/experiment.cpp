#include "frechet/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

#include "frechet/euclidean.hpp"
#include "frechet/sphere.hpp"

namespace frechet {

namespace {

bool same_bandwidth(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

nlohmann::json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

void require(bool condition, const std::string& what) {
  if (!condition) throw Error(ErrorCode::ParameterDomain, what);
}

bool uses_bandwidth(const std::string& method) { return method == "nw" || method == "local"; }

class Stopwatch {
 public:
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// Evaluates one method on one simulated sample, turning library errors into
// failed records.
template <class Fit>
RunRecord score(const std::string& method, int n, int run, double bandwidth, Fit&& integrated_error) {
  RunRecord rec;
  rec.method = method;
  rec.n = n;
  rec.run = run;
  rec.bandwidth = bandwidth;
  Stopwatch clock;
  try {
    rec.error = integrated_error();
    rec.ok = true;
  } catch (const Error& e) {
    rec.ok = false;
    rec.error = std::nan("");
    rec.diagnostics = e.what();
  }
  rec.wall_ms = clock.elapsed_ms();
  return rec;
}

std::vector<RunRecord> flatten(std::vector<std::vector<RunRecord>>&& per_item) {
  std::vector<RunRecord> out;
  for (auto& item : per_item)
    for (auto& rec : item) out.push_back(std::move(rec));
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

void ExperimentConfig::validate() const {
  require(space == "wasserstein" || space == "sphere", "space must be 'wasserstein' or 'sphere'");
  require(!methods.empty(), "at least one method is required");
  for (const auto& m : methods) {
    if (space == "wasserstein")
      require(m == "global" || m == "oracle" || m == "nw", "wasserstein methods are global, oracle, nw; got '" + m + "'");
    else
      require(m == "local" || m == "nw", "sphere methods are local, nw; got '" + m + "'");
    if (uses_bandwidth(m)) require(!bandwidths.empty(), "method '" + m + "' needs a bandwidth grid");
  }
  require(!sample_sizes.empty(), "at least one sample size is required");
  for (int n : sample_sizes) require(n >= 3, "sample sizes must be >= 3");
  require(runs >= 1, "runs must be positive");
  for (double h : bandwidths) require(h > 0.0 && std::isfinite(h), "bandwidths must be positive");
  require(x_grid.points >= 1 && x_grid.upper > x_grid.lower, "x_grid needs points >= 1 and upper > lower");
  parse_kernel_shape(kernel);
  if (space == "wasserstein") {
    require(setting == 1 || setting == 2, "setting must be 1 or 2");
    require(grid_size >= 1, "grid_size must be positive");
    model.validate();
    if (setting == 2)
      for (const auto& m : methods) require(m != "oracle", "the oracle regression applies to setting 1 only");
  } else {
    require(noise_var > 0.0, "noise_var must be positive");
    require(x_grid.lower >= 0.0 && x_grid.upper <= 1.0, "sphere x_grid must lie in [0, 1]");
  }
}

nlohmann::json to_json(const ExperimentConfig& c) {
  return {
      {"space", c.space},
      {"preset", c.preset},
      {"setting", c.setting},
      {"methods", c.methods},
      {"sample_sizes", c.sample_sizes},
      {"runs", c.runs},
      {"seed", c.seed},
      {"grid_size", c.grid_size},
      {"model",
       {{"mu0", c.model.mu0},
        {"beta", c.model.beta},
        {"sigma0", c.model.sigma0},
        {"gamma", c.model.gamma},
        {"v1", c.model.v1},
        {"v2", c.model.v2},
        {"l", c.model.l}}},
      {"noise_var", c.noise_var},
      {"bandwidths", c.bandwidths},
      {"kernel", c.kernel},
      {"x_grid", {{"lower", c.x_grid.lower}, {"upper", c.x_grid.upper}, {"points", c.x_grid.points}}},
  };
}

ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig c) {
  if (!j.is_object()) throw Error(ErrorCode::DataFormat, "experiment config must be an object");
  static const std::set<std::string> known = {"space", "preset", "setting", "methods", "sample_sizes",
                                              "runs", "seed", "grid_size", "model", "noise_var",
                                              "bandwidths", "kernel", "x_grid"};
  try {
    for (const auto& [key, value] : j.items())
      if (!known.contains(key)) throw Error(ErrorCode::DataFormat, "unknown config field '" + key + "'");
    if (j.contains("preset") && !j.at("preset").get<std::string>().empty() && c.preset.empty()) {
      c = preset_config(j.at("preset").get<std::string>());
    }
    const auto get = [&j](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("space", c.space);
    get("preset", c.preset);
    get("setting", c.setting);
    get("methods", c.methods);
    get("sample_sizes", c.sample_sizes);
    get("runs", c.runs);
    get("seed", c.seed);
    get("grid_size", c.grid_size);
    get("noise_var", c.noise_var);
    get("bandwidths", c.bandwidths);
    get("kernel", c.kernel);
    if (j.contains("model")) {
      const auto& m = j.at("model");
      const auto mget = [&m](const char* key, auto& field) {
        if (m.contains(key)) field = m.at(key).get<std::decay_t<decltype(field)>>();
      };
      mget("mu0", c.model.mu0);
      mget("beta", c.model.beta);
      mget("sigma0", c.model.sigma0);
      mget("gamma", c.model.gamma);
      mget("v1", c.model.v1);
      mget("v2", c.model.v2);
      mget("l", c.model.l);
    }
    if (j.contains("x_grid")) {
      const auto& g = j.at("x_grid");
      if (g.contains("lower")) c.x_grid.lower = g.at("lower").get<double>();
      if (g.contains("upper")) c.x_grid.upper = g.at("upper").get<double>();
      if (g.contains("points")) c.x_grid.points = g.at("points").get<int>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::DataFormat, std::string("bad experiment config: ") + e.what());
  }
  return c;
}

std::vector<double> linear_grid(double first, double last, int count) {
  if (count < 1) throw Error(ErrorCode::ParameterDomain, "grid needs at least one point");
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
    // Round to 1e-12 so that grids like 0.05, 0.06, ... print cleanly.
    out[static_cast<std::size_t>(i)] = std::round((first + t * (last - first)) * 1e12) / 1e12;
  }
  return out;
}

std::vector<std::string> preset_names() { return {"setting1", "setting2", "table1-low", "table1-high"}; }

ExperimentConfig preset_config(const std::string& name) {
  ExperimentConfig c;
  c.preset = name;
  if (name == "setting1" || name == "setting2") {
    c.space = "wasserstein";
    c.setting = name == "setting1" ? 1 : 2;
    c.model = c.setting == 1 ? DistributionModel::setting1() : DistributionModel::setting2();
    c.methods = c.setting == 1 ? std::vector<std::string>{"global", "oracle", "nw"}
                               : std::vector<std::string>{"global", "nw"};
    c.sample_sizes = {50, 100, 200};
    c.runs = 200;
    c.bandwidths = linear_grid(0.2, 0.7, 11);
    c.x_grid = {-1.0, 1.0, 50};
    return c;
  }
  if (name == "table1-low" || name == "table1-high") {
    c.space = "sphere";
    // Per-coordinate tangent noise sd 0.2 (low) and 0.35 (high).
    c.noise_var = name == "table1-low" ? 0.2 * 0.2 : 0.35 * 0.35;
    c.methods = {"local", "nw"};
    c.sample_sizes = {50, 100, 200};
    c.runs = 200;
    c.bandwidths = linear_grid(0.05, 0.30, 26);
    c.x_grid = {0.0, 1.0, 50};
    return c;
  }
  throw Error(ErrorCode::ParameterDomain, "unknown preset '" + name + "'");
}

// ---------------------------------------------------------------------------
// Records and summaries

bool RunRecord::same_outcome(const RunRecord& o) const {
  const bool error_equal = (std::isnan(error) && std::isnan(o.error)) || error == o.error;
  return method == o.method && n == o.n && run == o.run && same_bandwidth(bandwidth, o.bandwidth) &&
         error_equal && ok == o.ok && diagnostics == o.diagnostics;
}

nlohmann::json to_json(const RunRecord& r) {
  return {{"method", r.method}, {"n", r.n},   {"run", r.run},           {"bandwidth", number_or_null(r.bandwidth)},
          {"error", number_or_null(r.error)}, {"ok", r.ok}, {"diagnostics", r.diagnostics}, {"wall_ms", r.wall_ms}};
}

const GroupSummary* ExperimentResult::find_best(const std::string& method, int n) const {
  for (const auto& g : best)
    if (g.method == method && g.n == n) return &g;
  return nullptr;
}

std::vector<double> ExperimentResult::errors(const std::string& method, int n, double bandwidth) const {
  std::vector<double> out;
  for (const auto& r : records)
    if (r.method == method && r.n == n && same_bandwidth(r.bandwidth, bandwidth) && r.ok) out.push_back(r.error);
  return out;
}

void summarize_records(ExperimentResult& result) {
  result.groups.clear();
  result.best.clear();
  const auto& c = result.config;
  for (int n : c.sample_sizes) {
    for (const auto& method : c.methods) {
      std::vector<double> hs = uses_bandwidth(method) ? c.bandwidths : std::vector<double>{std::nan("")};
      std::vector<GroupSummary> candidates;
      for (double h : hs) {
        GroupSummary g;
        g.method = method;
        g.n = n;
        g.bandwidth = h;
        std::vector<double> errs;
        for (const auto& r : result.records) {
          if (r.method != method || r.n != n || !same_bandwidth(r.bandwidth, h)) continue;
          if (r.ok)
            errs.push_back(r.error);
          else
            ++g.failures;
        }
        g.stats = summarize(errs);
        result.groups.push_back(g);
        candidates.push_back(g);
      }
      const auto better = [](const GroupSummary& a, const GroupSummary& b) {
        if (a.failures != b.failures) return a.failures < b.failures;
        if (a.stats.count == 0) return false;
        if (b.stats.count == 0) return true;
        return a.stats.mean < b.stats.mean;
      };
      result.best.push_back(*std::min_element(candidates.begin(), candidates.end(), better));
    }
  }
}

void write_records_ndjson(const ExperimentResult& result, std::ostream& out) {
  for (const auto& r : result.records) out << to_json(r).dump() << '\n';
}

void write_group_csv(const ExperimentResult& result, std::ostream& out, bool best_only) {
  out << "method,n,bandwidth,runs,failures,mean,median,q1,q3,mean_x100\n";
  out << std::setprecision(10);
  for (const auto& g : best_only ? result.best : result.groups) {
    out << g.method << ',' << g.n << ',';
    if (std::isfinite(g.bandwidth)) out << g.bandwidth;
    out << ',' << g.stats.count << ',' << g.failures << ',' << g.stats.mean << ',' << g.stats.median << ','
        << g.stats.q1 << ',' << g.stats.q3 << ',' << 100.0 * g.stats.mean << '\n';
  }
}

// ---------------------------------------------------------------------------
// Simulations

ExperimentResult run_wasserstein_experiment(const ExperimentConfig& config) {
  config.validate();
  if (config.space != "wasserstein") throw Error(ErrorCode::ParameterDomain, "not a wasserstein config");
  const QuantileGrid grid(config.grid_size);
  const WassersteinSpace space(grid);
  const Kernel kernel(parse_kernel_shape(config.kernel));
  const std::vector<double> nodes = config.x_grid.nodes();
  const double width = config.x_grid.width();
  std::vector<QuantileFunction> truth;
  for (double x : nodes) truth.push_back(config.model.truth(x, grid));

  const auto integrate = [&](auto&& fit_at) {
    double total = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const double d = wasserstein_distance(fit_at(nodes[k]), truth[k]);
      total += d * d;
    }
    return total * width;
  };

  const std::size_t runs = static_cast<std::size_t>(config.runs);
  std::vector<std::vector<RunRecord>> per_item(config.sample_sizes.size() * runs);
  parallel_for(per_item.size(), [&](std::size_t item) {
    const int n = config.sample_sizes[item / runs];
    const int run = static_cast<int>(item % runs);
    const std::uint64_t seed = derive_seed(config.seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(run));
    const WassersteinSample sample = config.setting == 1 ? simulate_setting1(n, config.model, grid, seed)
                                                         : simulate_setting2(n, config.model, grid, seed);
    std::vector<RunRecord>& out = per_item[item];
    std::optional<PredictorMatrix> X;
    std::string design_error;
    try {
      X.emplace(Eigen::MatrixXd(sample.x));
    } catch (const Error& e) {
      design_error = e.what();
    }
    const auto guarded = [&](auto&& body) {
      return [&, body]() {
        if (!X) throw Error(ErrorCode::CovarianceSingular, design_error);
        return body();
      };
    };
    for (const auto& method : config.methods) {
      if (method == "global") {
        out.push_back(score(method, n, run, std::nan(""), guarded([&] {
          return integrate([&](double x) {
            return space.weighted_mean(global_weights(*X, Eigen::VectorXd::Constant(1, x)), sample.y);
          });
        })));
      } else if (method == "oracle") {
        out.push_back(score(method, n, run, std::nan(""), [&] {
          const OracleRegression oracle(sample, grid);
          return integrate(oracle);
        }));
      } else {
        for (double h : config.bandwidths) {
          out.push_back(score(method, n, run, h, guarded([&, h] {
            return integrate([&](double x) { return space.weighted_mean(nw_weights(*X, x, h, kernel), sample.y); });
          })));
        }
      }
    }
  });

  ExperimentResult result;
  result.config = config;
  result.records = flatten(std::move(per_item));
  summarize_records(result);
  return result;
}

ExperimentResult run_sphere_experiment(const ExperimentConfig& config) {
  config.validate();
  if (config.space != "sphere") throw Error(ErrorCode::ParameterDomain, "not a sphere config");
  const Kernel kernel(parse_kernel_shape(config.kernel));
  const SphereSolverOptions solver;
  const std::vector<double> nodes = config.x_grid.nodes();
  const double width = config.x_grid.width();
  std::vector<UnitVector> truth;
  for (double x : nodes) truth.push_back(spiral_truth(x));

  const std::size_t runs = static_cast<std::size_t>(config.runs);
  std::vector<std::vector<RunRecord>> per_item(config.sample_sizes.size() * runs);
  parallel_for(per_item.size(), [&](std::size_t item) {
    const int n = config.sample_sizes[item / runs];
    const int run = static_cast<int>(item % runs);
    const std::uint64_t seed = derive_seed(config.seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(run));
    const SphereSample sample = simulate_sphere(n, config.noise_var, seed);
    const PredictorMatrix X{Eigen::MatrixXd(sample.x)};
    std::vector<RunRecord>& out = per_item[item];
    for (const auto& method : config.methods) {
      for (double h : config.bandwidths) {
        out.push_back(score(method, n, run, h, [&] {
          double total = 0.0;
          for (std::size_t k = 0; k < nodes.size(); ++k) {
            const WeightVector w = method == "local" ? local_weights(X, nodes[k], h, kernel)
                                                     : nw_weights(X, nodes[k], h, kernel);
            const double d = geodesic_distance(weighted_frechet_mean_sphere(w, sample.y, solver), truth[k]);
            total += d * d;
          }
          return total * width;
        }));
      }
    }
  });

  ExperimentResult result;
  result.config = config;
  result.records = flatten(std::move(per_item));
  summarize_records(result);
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  return config.space == "sphere" ? run_sphere_experiment(config) : run_wasserstein_experiment(config);
}

// ---------------------------------------------------------------------------
// Rates

RateCheckResult rate_check(const std::function<double(int, std::uint64_t)>& error_for,
                           const std::vector<int>& sample_sizes, int runs, std::uint64_t seed) {
  if (sample_sizes.size() < 3) throw Error(ErrorCode::ParameterDomain, "rate check needs at least 3 sample sizes");
  if (runs < 1) throw Error(ErrorCode::ParameterDomain, "runs must be positive");
  RateCheckResult out;
  out.sample_sizes = sample_sizes;
  std::vector<double> ns;
  for (int n : sample_sizes) {
    std::vector<double> errs(static_cast<std::size_t>(runs));
    parallel_for(errs.size(), [&](std::size_t r) {
      errs[r] = error_for(n, derive_seed(seed, static_cast<std::uint64_t>(n), r));
    });
    const double med = median(errs);
    if (!(med > 0.0)) {
      std::ostringstream msg;
      msg << "median error at n = " << n << " is " << med << "; the log-log slope is undefined";
      throw Error(ErrorCode::DegenerateResponse, msg.str());
    }
    out.median_error.push_back(med);
    ns.push_back(n);
  }
  out.slope = log_log_slope(ns, out.median_error);
  return out;
}

RateCheckResult run_rate_check(const RateCheckConfig& config) {
  const std::vector<double> nodes = config.x_grid.nodes();
  const double width = config.x_grid.width();
  if (config.space == "euclidean") {
    const Eigen::Vector3d a(1.0, -1.0, 0.5);
    const Eigen::Vector3d b(2.0, 0.0, -1.0);
    const EuclideanSpace space;
    return rate_check(
        [&](int n, std::uint64_t seed) {
          Rng rng = make_rng(seed);
          std::uniform_real_distribution<double> unif(-1.0, 1.0);
          std::normal_distribution<double> noise(0.0, 0.5);
          Eigen::MatrixXd x(n, 1);
          std::vector<Eigen::VectorXd> ys;
          for (int i = 0; i < n; ++i) {
            x(i, 0) = unif(rng);
            Eigen::VectorXd y = a + b * x(i, 0);
            for (Eigen::Index j = 0; j < y.size(); ++j) y[j] += noise(rng);
            ys.push_back(std::move(y));
          }
          const PredictorMatrix X(std::move(x));
          double total = 0.0;
          for (double t : nodes) {
            const Eigen::VectorXd fit = space.weighted_mean(global_weights(X, Eigen::VectorXd::Constant(1, t)), ys);
            total += (fit - (a + b * t)).squaredNorm();
          }
          return total * width;
        },
        config.sample_sizes, config.runs, config.seed);
  }
  if (config.space == "wasserstein") {
    const QuantileGrid grid(config.grid_size);
    const WassersteinSpace space(grid);
    const DistributionModel model = config.setting == 1 ? DistributionModel::setting1() : DistributionModel::setting2();
    std::vector<QuantileFunction> truth;
    for (double t : nodes) truth.push_back(model.truth(t, grid));
    return rate_check(
        [&](int n, std::uint64_t seed) {
          const WassersteinSample s = config.setting == 1 ? simulate_setting1(n, model, grid, seed)
                                                          : simulate_setting2(n, model, grid, seed);
          const PredictorMatrix X{Eigen::MatrixXd(s.x)};
          double total = 0.0;
          for (std::size_t k = 0; k < nodes.size(); ++k) {
            const double d = wasserstein_distance(
                space.weighted_mean(global_weights(X, Eigen::VectorXd::Constant(1, nodes[k])), s.y), truth[k]);
            total += d * d;
          }
          return total * width;
        },
        config.sample_sizes, config.runs, config.seed);
  }
  throw Error(ErrorCode::ParameterDomain, "rate check supports the euclidean and wasserstein spaces");
}

nlohmann::json to_json(const RateCheckResult& r) {
  return {{"sample_sizes", r.sample_sizes}, {"median_error", r.median_error}, {"slope", r.slope}};
}

}  // namespace frechet
