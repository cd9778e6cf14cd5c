#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "frechet/experiment.hpp"
#include "frechet/io.hpp"
#include "frechet/parallel.hpp"
#include "frechet/random.hpp"
#include "frechet/stats.hpp"

using namespace frechet;

namespace {

class ScopedThreads {
 public:
  explicit ScopedThreads(const char* value) { setenv("FRECHET_THREADS", value, 1); }
  ~ScopedThreads() { unsetenv("FRECHET_THREADS"); }
};

ExperimentConfig small_wasserstein(int setting) {
  auto c = preset_config(setting == 1 ? "setting1" : "setting2");
  c.sample_sizes = {30, 60};
  c.runs = 4;
  c.grid_size = 100;
  c.bandwidths = {0.3, 0.5};
  return c;
}

ExperimentConfig small_sphere() {
  auto c = preset_config("table1-low");
  c.sample_sizes = {40};
  c.runs = 3;
  c.bandwidths = {0.15, 0.25};
  c.x_grid.points = 10;
  return c;
}

}  // namespace

TEST(Seeds, DerivedSeedsAreStableAndDistinct) {
  static_assert(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
  EXPECT_NE(derive_seed(1, 2, 3), derive_seed(1, 2, 4));
  EXPECT_NE(derive_seed(1, 2, 3), derive_seed(1, 3, 3));
  EXPECT_NE(derive_seed(1, 2, 3), derive_seed(2, 2, 3));
  Rng a = make_rng(99), b = make_rng(99);
  EXPECT_EQ(a(), b());
}

TEST(Parallel, CoversEveryIndexAndRethrowsLowestFailure) {
  ScopedThreads threads("3");
  EXPECT_EQ(worker_count(), 3u);
  std::vector<int> hit(1000, 0);
  parallel_for(hit.size(), [&](std::size_t i) { hit[i] += 1; });
  EXPECT_TRUE(std::all_of(hit.begin(), hit.end(), [](int h) { return h == 1; }));
  try {
    parallel_for(100, [](std::size_t i) {
      if (i == 17 || i == 80) throw std::runtime_error("item " + std::to_string(i));
    });
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "item 17");
  }
}

TEST(Stats, QuantilesAndSummary) {
  const std::vector<double> v{4.0, 1.0, 3.0, 2.0, 5.0};
  EXPECT_DOUBLE_EQ(median(v), 3.0);
  EXPECT_DOUBLE_EQ(sample_quantile(v, 0.25), 2.0);
  EXPECT_DOUBLE_EQ(sample_quantile({1.0, 2.0, 3.0, 4.0}, 0.5), 2.5);
  const auto s = summarize(v);
  EXPECT_EQ(s.count, 5u);
  EXPECT_DOUBLE_EQ(s.mean, 3.0);
  EXPECT_DOUBLE_EQ(s.q3, 4.0);
}

TEST(Stats, SignedRankExactSmallSample) {
  // All 8 differences positive: the exact two-sided p-value is 2 / 2^8.
  const std::vector<double> d{0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0};
  const auto r = wilcoxon_signed_rank(d);
  EXPECT_TRUE(r.exact);
  EXPECT_DOUBLE_EQ(r.statistic, 36.0);
  EXPECT_NEAR(r.p_value, 2.0 / 256.0, 1e-15);
  // Symmetric differences: W = 18 is the centre of the null.
  const std::vector<double> sym{-4.0, -3.0, -2.0, -1.0, 1.0, 2.0, 3.0, 4.0};
  EXPECT_NEAR(wilcoxon_signed_rank(sym).p_value, 1.0, 1e-12);
}

TEST(Stats, SignedRankNormalApproximation) {
  std::vector<double> d;
  for (int i = 1; i <= 60; ++i) d.push_back(i % 3 == 0 ? -i : i);
  const auto r = wilcoxon_signed_rank(d);
  EXPECT_FALSE(r.exact);
  // Reference: W+ over ranks, mean n(n+1)/4, sd sqrt(n(n+1)(2n+1)/24), continuity 0.5.
  double wplus = 0.0;
  for (int i = 1; i <= 60; ++i)
    if (i % 3 != 0) wplus += i;
  const double mu = 60.0 * 61.0 / 4.0, sd = std::sqrt(60.0 * 61.0 * 121.0 / 24.0);
  const double z = (std::abs(wplus - mu) - 0.5) / sd;
  EXPECT_DOUBLE_EQ(r.statistic, wplus);
  EXPECT_NEAR(r.p_value, std::erfc(z / std::sqrt(2.0)), 1e-12);
}

TEST(Stats, SignedRankDropsZeros) {
  const std::vector<double> d{1e-15, -1e-15, 0.0, 2.0, -1.0, 3.0};
  const auto r = wilcoxon_signed_rank(d, 1e-12);
  EXPECT_EQ(r.n_used, 3u);
  const std::vector<double> zeros(5, 0.0);
  const auto z = wilcoxon_signed_rank(zeros, 1e-12);
  EXPECT_EQ(z.n_used, 0u);
  EXPECT_EQ(z.p_value, 1.0);
}

TEST(Stats, LogLogSlope) {
  const std::vector<double> n{50, 200, 800};
  const std::vector<double> e{1.0 / 50, 1.0 / 200, 1.0 / 800};
  EXPECT_NEAR(log_log_slope(n, e), -1.0, 1e-12);
  EXPECT_THROW(log_log_slope(n, std::vector<double>{1.0, 0.0, 1.0}), Error);
}

TEST(Csv, HeaderDetectionAndLoaders) {
  std::istringstream in("x,y1,y2\n0.1,1,2\n0.2,3,4\n0.3,5,6\n");
  const auto t = read_csv(in);
  EXPECT_EQ(t.header.size(), 3u);
  ASSERT_EQ(t.rows.size(), 3u);
  const auto d = vector_dataset(t, 1);
  EXPECT_EQ(d.predictors.rows(), 3);
  EXPECT_EQ(d.responses[2], Eigen::Vector2d(5, 6));

  std::istringstream bad("1,2\n3\n");
  try {
    read_csv(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DataFormat);
  }
  std::istringstream text("1,2\n3,abc\n");
  EXPECT_THROW(read_csv(text), Error);
}

TEST(Csv, SpaceSpecificLoaders) {
  std::istringstream q("0.5,0,1,2\n0.7,1,1,3\n");
  const auto qt = read_csv(q);
  EXPECT_EQ(quantile_dataset(qt, 1).responses[1].size(), 3);
  EXPECT_THROW(quantile_dataset(qt, 1, 4), Error);
  std::istringstream decreasing("0.5,2,1,0\n");
  EXPECT_THROW(quantile_dataset(read_csv(decreasing), 1), Error);

  std::istringstream c("0.1,0.2,0.3,0.4\n0.2,0.1,0.0,-0.1\n");
  const auto cd = correlation_dataset(read_csv(c), 1);
  EXPECT_EQ(cd.responses[0].dim(), 3);
  EXPECT_DOUBLE_EQ(cd.responses[0].matrix()(1, 2), 0.4);
  std::istringstream c5("0.1,0.2,0.3,0.4,0.5\n");
  EXPECT_THROW(correlation_dataset(read_csv(c5), 1), Error);

  std::istringstream s("0.3,0,0,2\n");
  const auto sd = sphere_dataset(read_csv(s), 1);
  EXPECT_DOUBLE_EQ(sd.responses[0][2], 1.0);
}

TEST(Config, JsonRoundTripForEveryPreset) {
  for (const auto& name : preset_names()) {
    const auto c = preset_config(name);
    EXPECT_NO_THROW(c.validate());
    const auto back = config_from_json(nlohmann::json::parse(to_json(c).dump()));
    EXPECT_EQ(back, c) << name;
  }
  EXPECT_THROW(preset_config("nope"), Error);
}

TEST(Config, PresetsCarryModelParameters) {
  const auto s1 = preset_config("setting1");
  EXPECT_EQ(s1.model, DistributionModel::setting1());
  EXPECT_EQ(s1.methods, (std::vector<std::string>{"global", "oracle", "nw"}));
  EXPECT_DOUBLE_EQ(s1.bandwidths.front(), 0.2);
  EXPECT_DOUBLE_EQ(s1.bandwidths.back(), 0.7);
  const auto s2 = preset_config("setting2");
  EXPECT_EQ(s2.model, DistributionModel::setting2());
  const auto low = preset_config("table1-low"), high = preset_config("table1-high");
  EXPECT_EQ(low.space, "sphere");
  EXPECT_EQ(low.bandwidths.size(), 26u);
  EXPECT_DOUBLE_EQ(low.bandwidths[1], 0.06);
  EXPECT_LT(low.noise_var, high.noise_var);
}

TEST(Config, OverridesUnknownKeysAndToml) {
  const auto j = nlohmann::json::parse(R"({"preset": "setting2", "runs": 7, "model": {"l": 3}})");
  const auto c = config_from_json(j);
  EXPECT_EQ(c.runs, 7);
  EXPECT_EQ(c.model.l, 3);
  EXPECT_EQ(c.model.v1, 1.0);
  EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"rnus": 3})")), Error);
  EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"runs": "many"})")), Error);

  std::istringstream toml(R"(# sphere study
preset = "table1-high"
runs = 12
sample_sizes = [50, 100]
bandwidths = [0.1, 0.2]   # coarse
[x_grid]
points = 25
)");
  const auto tc = config_from_json(parse_toml_subset(toml));
  EXPECT_EQ(tc.space, "sphere");
  EXPECT_EQ(tc.runs, 12);
  EXPECT_EQ(tc.sample_sizes, (std::vector<int>{50, 100}));
  EXPECT_EQ(tc.x_grid.points, 25);
  EXPECT_DOUBLE_EQ(tc.x_grid.lower, 0.0);
  std::istringstream broken("runs 12\n");
  EXPECT_THROW(parse_toml_subset(broken), Error);
}

TEST(Config, ValidationErrors) {
  auto c = preset_config("setting1");
  c.methods = {"local"};
  EXPECT_THROW(c.validate(), Error);
  c = preset_config("table1-low");
  c.noise_var = 0.0;
  EXPECT_THROW(c.validate(), Error);
  c = preset_config("setting2");
  c.bandwidths.clear();
  EXPECT_THROW(c.validate(), Error);
}

TEST(WassersteinExperiment, DeterministicAcrossWorkerCounts) {
  const auto config = small_wasserstein(1);
  ExperimentResult a, b;
  {
    ScopedThreads t("1");
    a = run_experiment(config);
  }
  {
    ScopedThreads t("3");
    b = run_experiment(config);
  }
  ASSERT_EQ(a.records.size(), b.records.size());
  // 2 sizes x 4 runs x (global + oracle + 2 nw bandwidths)
  EXPECT_EQ(a.records.size(), 2u * 4u * 4u);
  for (std::size_t i = 0; i < a.records.size(); ++i) EXPECT_TRUE(a.records[i].same_outcome(b.records[i]));
}

TEST(WassersteinExperiment, SingleRunIsReproducible) {
  auto config = small_wasserstein(2);
  config.sample_sizes = {50};
  config.runs = 1;
  const auto a = run_experiment(config), b = run_experiment(config);
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_TRUE(a.records[i].same_outcome(b.records[i]));
    EXPECT_GE(a.records[i].error, 0.0);
  }
}

TEST(WassersteinExperiment, AddingRunsKeepsEarlierRuns) {
  auto config = small_wasserstein(2);
  const auto a = run_experiment(config);
  config.runs = 6;
  const auto b = run_experiment(config);
  const auto more = b.errors("global", 30);
  ASSERT_EQ(more.size(), 6u);
  EXPECT_EQ(a.errors("global", 30), std::vector<double>(more.begin(), more.begin() + 4));
}

TEST(WassersteinExperiment, SummariesMatchRecords) {
  const auto r = run_experiment(small_wasserstein(2));
  for (const auto& g : r.groups) {
    const auto errs = r.errors(g.method, g.n, g.bandwidth);
    const auto s = summarize(errs);
    EXPECT_EQ(g.stats.count, errs.size());
    EXPECT_EQ(g.stats.mean, s.mean);
    EXPECT_EQ(g.stats.median, s.median);
    EXPECT_EQ(g.stats.q1, s.q1);
    EXPECT_EQ(g.stats.q3, s.q3);
  }
  const auto* best = r.find_best("nw", 60);
  ASSERT_NE(best, nullptr);
  for (const auto& g : r.groups)
    if (g.method == "nw" && g.n == 60) EXPECT_LE(best->stats.mean, g.stats.mean);
  EXPECT_EQ(r.find_best("oracle", 30), nullptr);  // setting 2 has no oracle
}

TEST(WassersteinExperiment, OutputsAreWellFormed) {
  const auto r = run_experiment(small_wasserstein(1));
  std::ostringstream nd, csv;
  write_records_ndjson(r, nd);
  std::istringstream lines(nd.str());
  std::string line;
  std::size_t count = 0;
  while (std::getline(lines, line)) {
    const auto j = nlohmann::json::parse(line);
    EXPECT_TRUE(j.contains("error"));
    EXPECT_TRUE(j.contains("wall_ms"));
    ++count;
  }
  EXPECT_EQ(count, r.records.size());
  write_group_csv(r, csv, true);
  EXPECT_EQ(csv.str().rfind("method,n,bandwidth,runs,failures,mean,median,q1,q3", 0), 0u);
}

TEST(SphereExperiment, RunsAndIsDeterministic) {
  const auto config = small_sphere();
  const auto a = run_experiment(config), b = run_experiment(config);
  ASSERT_EQ(a.records.size(), 3u * 2u * 2u);
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_TRUE(a.records[i].same_outcome(b.records[i]));
    EXPECT_TRUE(a.records[i].ok) << a.records[i].diagnostics;
  }
}

TEST(SphereExperiment, LessNoiseGivesLessError) {
  auto config = small_sphere();
  const auto noisy = run_experiment(config);
  config.noise_var = 1e-12;
  const auto clean = run_experiment(config);
  for (const auto& g : clean.best) {
    const auto* ref = noisy.find_best(g.method, g.n);
    ASSERT_NE(ref, nullptr);
    EXPECT_LT(g.stats.mean, ref->stats.mean);
    EXPECT_LT(g.stats.mean, 0.05);
  }
}

TEST(SphereExperiment, FailuresAreRecordedNotFatal) {
  auto config = small_sphere();
  config.bandwidths = {0.001};
  const auto r = run_experiment(config);
  for (const auto& rec : r.records) {
    EXPECT_FALSE(rec.ok);
    EXPECT_FALSE(rec.diagnostics.empty());
  }
  for (const auto& g : r.groups) EXPECT_EQ(g.failures, 3u);
}

TEST(RateCheck, ZeroErrorsAreFlagged) {
  try {
    rate_check([](int, std::uint64_t) { return 0.0; }, {50, 200, 800}, 5, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateResponse);
  }
  EXPECT_THROW(rate_check([](int n, std::uint64_t) { return 1.0 / n; }, {50, 200}, 5, 1), Error);
  const auto r = rate_check([](int n, std::uint64_t) { return 3.0 / n; }, {50, 200, 800}, 5, 1);
  EXPECT_NEAR(r.slope, -1.0, 1e-12);
}

TEST(RateCheck, EuclideanParametricRate) {
  RateCheckConfig c;
  c.runs = 40;
  const auto r = run_rate_check(c);
  EXPECT_NEAR(r.slope, -1.0, 0.3);
  c.space = "sphere";
  EXPECT_THROW(run_rate_check(c), Error);
}
