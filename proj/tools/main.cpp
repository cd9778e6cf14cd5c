// frechet: command-line front end for fitting, inference and simulation.
//
// Exit status: 0 success, 1 bad input or data, 2 solver non-convergence.

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "frechet/correlation.hpp"
#include "frechet/euclidean.hpp"
#include "frechet/experiment.hpp"
#include "frechet/inference.hpp"
#include "frechet/io.hpp"
#include "frechet/sphere.hpp"
#include "frechet/wasserstein.hpp"

using namespace frechet;
using json = nlohmann::json;

namespace {

json to_json_object(const Eigen::VectorXd& v) { return std::vector<double>(v.begin(), v.end()); }
json to_json_object(const QuantileFunction& q) { return to_json_object(q.values()); }
json to_json_object(const UnitVector& u) { return to_json_object(Eigen::VectorXd(u.coords())); }
json to_json_object(const CorrMatrix& c) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < c.dim(); ++i) rows.push_back(to_json_object(Eigen::VectorXd(c.matrix().row(i))));
  return rows;
}

/// Writes to --out, or standard output when it is empty or "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw Error(ErrorCode::DataFormat, "cannot open output file " + path);
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

struct DataOptions {
  std::string space = "euclidean";
  std::string path;
  int p = 1;
  int r = 0;
  int grid = 0;
  SphereSolverOptions sphere;
};

/// Loads the CSV as the requested space and calls f(space, X, responses).
template <class F>
void with_dataset(const DataOptions& d, F&& f) {
  const CsvTable table = read_csv(std::filesystem::path(d.path));
  if (d.space == "euclidean") {
    auto data = vector_dataset(table, d.p);
    f(EuclideanSpace{}, PredictorMatrix(data.predictors), std::span<const Eigen::VectorXd>(data.responses));
  } else if (d.space == "wasserstein") {
    auto data = quantile_dataset(table, d.p, d.grid);
    f(WassersteinSpace{}, PredictorMatrix(data.predictors), std::span<const QuantileFunction>(data.responses));
  } else if (d.space == "correlation") {
    auto data = correlation_dataset(table, d.p, d.r);
    f(CorrelationSpace{}, PredictorMatrix(data.predictors), std::span<const CorrMatrix>(data.responses));
  } else if (d.space == "sphere") {
    auto data = sphere_dataset(table, d.p);
    f(SphereSpace(d.sphere), PredictorMatrix(data.predictors), std::span<const UnitVector>(data.responses));
  } else {
    throw Error(ErrorCode::ParameterDomain, "unknown space '" + d.space + "'");
  }
}

struct MethodOptions {
  std::string method = "global";
  double bandwidth = 0.0;
  std::string kernel = "epanechnikov";
};

template <class F>
void with_fitter(const MethodOptions& m, F&& f) {
  const Kernel kernel(parse_kernel_shape(m.kernel));
  if (m.method == "global") {
    f(GlobalFitter{});
    return;
  }
  if (!(m.bandwidth > 0.0)) throw Error(ErrorCode::ParameterDomain, "--bandwidth is required for " + m.method);
  if (m.method == "local")
    f(LocalFitter{m.bandwidth, kernel});
  else if (m.method == "nw")
    f(NwFitter{m.bandwidth, kernel});
  else
    throw Error(ErrorCode::ParameterDomain, "unknown method '" + m.method + "' (global, local, nw)");
}

void add_data_options(CLI::App* cmd, DataOptions& d) {
  cmd->add_option("--space", d.space, "euclidean | wasserstein | correlation | sphere")->capture_default_str();
  cmd->add_option("--data", d.path, "CSV: predictor columns, then response columns")->required();
  cmd->add_option("--p", d.p, "number of predictor columns")->capture_default_str();
  cmd->add_option("--r", d.r, "correlation matrix size (0 infers it)")->capture_default_str();
  cmd->add_option("--grid", d.grid, "expected quantile grid size (0 accepts any)")->capture_default_str();
  cmd->add_option("--max-iterations", d.sphere.max_iterations, "sphere solver iteration cap")->capture_default_str();
}

void add_method_options(CLI::App* cmd, MethodOptions& m) {
  cmd->add_option("--method", m.method, "global | local | nw")->capture_default_str();
  cmd->add_option("--bandwidth", m.bandwidth, "bandwidth for local and nw");
  cmd->add_option("--kernel", m.kernel, "epanechnikov | gaussian | uniform")->capture_default_str();
}

json report_json(const FitReport& r) {
  return {{"r2", r.r2}, {"r2_adjusted", r.r2_adjusted}, {"n", r.n}, {"q", r.q}, {"frechet_variance", r.frechet_variance}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frechet regression for distributions, correlation matrices, sphere data and vectors"};
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  std::string out;
  const auto common = [&](CLI::App* cmd) {
    cmd->add_option("--seed", seed, "root random seed")->capture_default_str();
    cmd->add_option("--out", out, "output file (default: standard output)");
  };

  // fit
  DataOptions fit_data;
  MethodOptions fit_method;
  std::vector<double> at;
  auto* fit = app.add_subcommand("fit", "fit at one or more predictor values (JSON)");
  add_data_options(fit, fit_data);
  add_method_options(fit, fit_method);
  fit->add_option("--at", at, "evaluation point(s); p values per point, comma separated")
      ->required()
      ->delimiter(',');
  common(fit);

  // permtest
  DataOptions perm_data;
  MethodOptions perm_method;
  int B = 199;
  auto* perm = app.add_subcommand("permtest", "permutation test of no effect (JSON)");
  add_data_options(perm, perm_data);
  add_method_options(perm, perm_method);
  perm->add_option("--B", B, "number of permutations")->capture_default_str();
  common(perm);

  // cv
  DataOptions cv_data;
  MethodOptions cv_method;
  int folds = 5, repeats = 1;
  auto* cv = app.add_subcommand("cv", "cross-validated prediction error (JSON)");
  add_data_options(cv, cv_data);
  add_method_options(cv, cv_method);
  cv->add_option("--k", folds, "number of folds")->capture_default_str();
  cv->add_option("--repeats", repeats, "repeated fold assignments")->capture_default_str();
  common(cv);

  // select
  DataOptions sel_data;
  MethodOptions sel_method;
  auto* sel = app.add_subcommand("select", "best predictor subset by adjusted R^2 (JSON)");
  add_data_options(sel, sel_data);
  add_method_options(sel, sel_method);
  common(sel);

  // simulate
  std::string sim_space, preset, config_path, log_path;
  std::vector<int> sizes;
  std::optional<int> runs;
  std::vector<double> bandwidths;
  std::optional<double> noise_var;
  bool best_only = false;
  auto* sim = app.add_subcommand("simulate", "simulation study; writes the error table as CSV");
  sim->add_option("--space", sim_space, "wasserstein | sphere");
  sim->add_option("--preset", preset, "setting1 | setting2 | table1-low | table1-high");
  sim->add_option("--config", config_path, "JSON or TOML config; flags override it");
  sim->add_option("--n", sizes, "sample sizes")->delimiter(',');
  sim->add_option("--runs", runs, "runs per sample size");
  sim->add_option("--bandwidths", bandwidths, "bandwidth grid")->delimiter(',');
  sim->add_option("--noise-var", noise_var, "sphere noise variance");
  sim->add_option("--log", log_path, "write per-run records as NDJSON");
  sim->add_flag("--best-only", best_only, "only the best bandwidth per method and n");
  common(sim);

  // rates
  RateCheckConfig rate;
  auto* rates = app.add_subcommand("rates", "log-log slope of median error against n (JSON)");
  rates->add_option("--space", rate.space, "euclidean | wasserstein")->capture_default_str();
  rates->add_option("--n", rate.sample_sizes, "sample sizes")->delimiter(',')->capture_default_str();
  rates->add_option("--runs", rate.runs, "runs per sample size")->capture_default_str();
  rates->add_option("--setting", rate.setting, "wasserstein generator (1 or 2)")->capture_default_str();
  common(rates);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    Output output(out);
    std::ostream& os = output.stream();

    if (*fit) {
      with_dataset(fit_data, [&](const auto& space, const PredictorMatrix& X, auto ys) {
        const auto p = static_cast<std::size_t>(X.p());
        if (at.empty() || at.size() % p != 0)
          throw Error(ErrorCode::ShapeMismatch, "--at needs a multiple of p values");
        if (fit_method.method != "global" && fit_method.method != "local" && fit_method.method != "nw")
          throw Error(ErrorCode::ParameterDomain, "unknown method '" + fit_method.method + "' (global, local, nw)");
        if (fit_method.method != "global" && p != 1)
          throw Error(ErrorCode::ParameterDomain, "local and nw fits need exactly one predictor");
        json fits = json::array();
        for (std::size_t k = 0; k < at.size(); k += p) {
          const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(at.data() + k, static_cast<Eigen::Index>(p));
          const Kernel kernel(parse_kernel_shape(fit_method.kernel));
          const auto result = fit_method.method == "global" ? fit_global(space, X, ys, x)
                              : fit_method.method == "local"
                                  ? fit_local(space, X, ys, x[0], fit_method.bandwidth, kernel)
                                  : fit_nw(space, X, ys, x[0], fit_method.bandwidth, kernel);
          fits.push_back({{"x", to_json_object(x)}, {"value", to_json_object(result.value)}, {"objective", result.objective}});
        }
        os << json{{"space", fit_data.space}, {"method", fit_method.method}, {"fits", fits}}.dump(2) << '\n';
      });
    } else if (*perm) {
      with_dataset(perm_data, [&](const auto& space, const PredictorMatrix& X, auto ys) {
        with_fitter(perm_method, [&](const auto& fitter) {
          const auto r = permutation_test(space, X, ys, fitter, B, seed);
          os << json{{"space", perm_data.space}, {"method", perm_method.method}, {"statistic", r.observed_stat},
                     {"p_value", r.p_value}, {"B", B}, {"seed", seed}}
                    .dump(2)
             << '\n';
        });
      });
    } else if (*cv) {
      with_dataset(cv_data, [&](const auto& space, const PredictorMatrix& X, auto ys) {
        with_fitter(cv_method, [&](const auto& fitter) {
          const double mspe = cv_prediction_error(space, X, ys, fitter, folds, repeats, seed);
          os << json{{"space", cv_data.space}, {"method", cv_method.method}, {"k", folds}, {"repeats", repeats},
                     {"mspe", mspe}, {"seed", seed}}
                    .dump(2)
             << '\n';
        });
      });
    } else if (*sel) {
      with_dataset(sel_data, [&](const auto& space, const PredictorMatrix& X, auto ys) {
        with_fitter(sel_method, [&](const auto& fitter) {
          const auto s = select_model(space, X, ys, fitter);
          json candidates = json::array();
          for (const auto& c : s.candidates) candidates.push_back({{"columns", c.columns}, {"report", report_json(c.report)}});
          os << json{{"space", sel_data.space}, {"columns", s.columns}, {"report", report_json(s.report)},
                     {"candidates", candidates}}
                    .dump(2)
             << '\n';
        });
      });
    } else if (*sim) {
      ExperimentConfig config;
      if (!preset.empty()) {
        config = preset_config(preset);
      } else if (sim_space == "sphere") {
        config = preset_config("table1-low");
      } else if (sim_space.empty() || sim_space == "wasserstein") {
        config = preset_config("setting1");
      }
      if (!sim_space.empty() && sim_space != config.space)
        throw Error(ErrorCode::ParameterDomain, "--space " + sim_space + " does not match the " + config.space + " preset");
      if (!config_path.empty()) config = config_from_json(load_config_document(config_path), config);
      if (!sizes.empty()) config.sample_sizes = sizes;
      if (runs) config.runs = *runs;
      if (!bandwidths.empty()) config.bandwidths = bandwidths;
      if (noise_var) config.noise_var = *noise_var;
      if (sim->count("--seed") > 0 || config_path.empty()) config.seed = seed;
      config.validate();

      const auto result = run_experiment(config);
      write_group_csv(result, os, best_only);
      if (!log_path.empty()) {
        Output log(log_path);
        write_records_ndjson(result, log.stream());
      }
      std::size_t failures = 0;
      for (const auto& g : result.groups) failures += g.failures;
      if (failures > 0) std::cerr << "frechet: " << failures << " run(s) failed; see the per-run log\n";
    } else if (*rates) {
      rate.seed = seed;
      os << to_json(run_rate_check(rate)).dump(2) << '\n';
    }
    if (!os) throw Error(ErrorCode::DataFormat, "failed writing output");
  } catch (const Error& e) {
    std::cerr << "frechet: " << e.what() << '\n';
    return e.code() == ErrorCode::NonConvergence ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "frechet: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
