#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "tsched/errors.hpp"
#include "tsched/metrics.hpp"
#include "tsched/rng.hpp"
#include "tsched/scheduler.hpp"
#include "tsched/simulator.hpp"

using namespace tsched;

namespace {

CoverageTimeline timeline(std::vector<std::pair<double, double>> pts) { return {std::move(pts)}; }

// Pairs (x, y) with x > y, ties counted 1/2.
double brute_u(const std::vector<double>& a, const std::vector<double>& b) {
  double u = 0.0;
  for (double x : a) {
    for (double y : b) u += x > y ? 1.0 : (x == y ? 0.5 : 0.0);
  }
  return u;
}

}  // namespace

TEST(Auc, Examples) {
  EXPECT_DOUBLE_EQ(auc(timeline({{0, 100}, {10, 100}})), 1000.0);
  EXPECT_DOUBLE_EQ(auc(timeline({{0, 0}, {10, 10}})), 50.0);
  EXPECT_DOUBLE_EQ(auc(timeline({{0, 0}, {5, 5}, {10, 10}})), 50.0);
  EXPECT_THROW(auc(timeline({{0, 3}})), Error);
  EXPECT_THROW(auc(timeline({{0, 3}, {0, 4}})), Error);
}

TEST(Auc, BoundedByMinAndMaxCoverage) {
  SeededRng rng(3);
  for (int r = 0; r < 100; ++r) {
    std::vector<std::pair<double, double>> pts;
    double step = 0.0, cov = 0.0;
    for (int i = 0; i < 20; ++i) {
      pts.emplace_back(step, cov);
      step += 1.0 + static_cast<double>(rng.below(10));
      cov += static_cast<double>(rng.below(3));
    }
    const double span = pts.back().first - pts.front().first;
    const double a = auc(timeline(pts));
    EXPECT_GE(a, pts.front().second * span);
    EXPECT_LE(a, pts.back().second * span);
  }
}

TEST(CoverageTimeline, SamplesIntervalAndLastStep) {
  TrialLog log;
  log.initial_covered = 1;
  for (std::uint64_t t = 1; t <= 250; ++t) {
    TrialStep s;
    s.step = t;
    s.covered_features = 1 + t / 50;
    log.steps.push_back(s);
  }
  const auto tl = coverage_timeline(log, 100);
  ASSERT_EQ(tl.points.size(), 4u);
  EXPECT_EQ(tl.points[0], (std::pair<double, double>{0, 1}));
  EXPECT_EQ(tl.points[1], (std::pair<double, double>{100, 3}));
  EXPECT_EQ(tl.points[2], (std::pair<double, double>{200, 5}));
  EXPECT_EQ(tl.points[3], (std::pair<double, double>{250, 6}));
  EXPECT_THROW(coverage_timeline(log, 0), ConfigError);
}

TEST(MannWhitney, CompleteSeparation) {
  const std::vector<double> a{1, 2, 3}, b{4, 5, 6};
  EXPECT_DOUBLE_EQ(mann_whitney_u(a, b).u, 0.0);
  EXPECT_DOUBLE_EQ(mann_whitney_u(b, a).u, 9.0);
}

TEST(MannWhitney, IdenticalSamples) {
  const std::vector<double> a{1, 2, 2, 5};
  const auto r = mann_whitney_u(a, a);
  EXPECT_DOUBLE_EQ(r.u, 8.0);
  EXPECT_DOUBLE_EQ(r.p_value, 1.0);
}

TEST(MannWhitney, MatchesPairCount) {
  const std::vector<double> a{1, 2, 4}, b{3, 5};
  EXPECT_DOUBLE_EQ(mann_whitney_u(a, b).u, brute_u(a, b));
  EXPECT_DOUBLE_EQ(mann_whitney_u(a, b).u, 1.0);
  SeededRng rng(8);
  for (int r = 0; r < 200; ++r) {
    std::vector<double> x(1 + rng.below(15)), y(1 + rng.below(15));
    for (auto& v : x) v = static_cast<double>(rng.below(6));
    for (auto& v : y) v = static_cast<double>(rng.below(6));
    const auto xy = mann_whitney_u(x, y);
    const auto yx = mann_whitney_u(y, x);
    EXPECT_DOUBLE_EQ(xy.u, brute_u(x, y));
    EXPECT_DOUBLE_EQ(xy.u + yx.u, static_cast<double>(x.size() * y.size()));
    EXPECT_NEAR(xy.p_value, yx.p_value, 1e-12);
    EXPECT_GT(xy.p_value, 0.0);
    EXPECT_LE(xy.p_value, 1.0);
  }
}

// Exact p-values frozen from an exhaustive permutation count over midranks
// (scipy.stats.rankdata + itertools.combinations).
TEST(MannWhitney, ExactPermutationOracle) {
  EXPECT_NEAR(mann_whitney_u(std::vector<double>{1, 2, 3, 4, 5}, std::vector<double>{6, 7, 8, 9, 10})
                  .p_value,
              2.0 / 252.0, 1e-12);
  EXPECT_NEAR(mann_whitney_u(std::vector<double>{1, 2, 2, 3}, std::vector<double>{2, 3, 4, 5, 5})
                  .p_value,
              10.0 / 126.0, 1e-12);
  EXPECT_NEAR(mann_whitney_u(std::vector<double>{3, 1, 7}, std::vector<double>{2, 9, 4, 8, 5, 6, 10})
                  .p_value,
              32.0 / 120.0, 1e-12);
}

// Normal-approximation p-values frozen from scipy.stats.mannwhitneyu
// (method="asymptotic", use_continuity=True, two-sided).
TEST(MannWhitney, NormalApproximationOracle) {
  std::vector<double> a, b;
  for (int i = 0; i < 10; ++i) a.push_back(i);
  for (int i = 0; i < 12; ++i) b.push_back(i + 3.5);
  auto r = mann_whitney_u(a, b);
  EXPECT_DOUBLE_EQ(r.u, 21.0);
  EXPECT_NEAR(r.p_value, 0.011129227614007952, 1e-9);

  const std::vector<double> c{1, 1, 2, 2, 3, 3, 4, 4, 5, 5};
  const std::vector<double> d{3, 3, 4, 4, 5, 5, 6, 6, 7, 7, 8};
  r = mann_whitney_u(c, d);
  EXPECT_DOUBLE_EQ(r.u, 18.0);
  EXPECT_NEAR(r.p_value, 0.009346741618421176, 1e-9);
}

TEST(MannWhitney, EmptySampleThrows) {
  EXPECT_THROW(mann_whitney_u(std::vector<double>{}, std::vector<double>{1}), Error);
}

TEST(Bootstrap, ConstantSampleGivesPointInterval) {
  const std::vector<double> xs(10, 4.0);
  const auto [lo, hi] = bootstrap_ci(xs, 0.95, 1000, 1);
  EXPECT_EQ(lo, 4.0);
  EXPECT_EQ(hi, 4.0);
}

TEST(Bootstrap, ContainsMeanOfSymmetricData) {
  SeededRng rng(12);
  for (int r = 0; r < 20; ++r) {
    std::vector<double> xs(40);
    for (auto& x : xs) x = 10.0 + rng.normal();
    const double m = mean(xs);
    const auto [lo, hi] = bootstrap_ci(xs, 0.95, 2000, 100 + r);
    EXPECT_LT(lo, m);
    EXPECT_GT(hi, m);
    EXPECT_LT(hi - lo, 1.5);
  }
}

TEST(Bootstrap, SeedDeterministic) {
  const std::vector<double> xs{1, 5, 2, 8, 3};
  EXPECT_EQ(bootstrap_ci(xs, 0.9, 500, 7), bootstrap_ci(xs, 0.9, 500, 7));
  EXPECT_THROW(bootstrap_ci(std::vector<double>{1}, 0.9, 500, 7), Error);
  EXPECT_THROW(bootstrap_ci(xs, 1.0, 500, 7), Error);
}

TEST(Consistency, Examples) {
  EXPECT_DOUBLE_EQ(consistency(70, 7, 10), 1.0);
  EXPECT_NEAR(consistency(238, 29, 10), 0.82, 0.005);
  EXPECT_DOUBLE_EQ(consistency(0, 1, 10), 0.0);
  EXPECT_THROW(consistency(1, 0, 10), Error);
}

TEST(CostSummary, Examples) {
  const auto same = summarize_costs(std::vector<double>{3, 3, 3});
  EXPECT_EQ(same.variance, 0.0);
  const auto s = summarize_costs(std::vector<double>{1, 3});
  EXPECT_DOUBLE_EQ(s.mean, 2.0);
  EXPECT_DOUBLE_EQ(s.variance, 1.0);
  EXPECT_THROW(summarize_costs(std::vector<double>{}), Error);
}

TEST(Overhead, SelectCostIndependentOfCorpusSize) {
  constexpr std::size_t kFeatures = 1024;
  auto select_costs = [&](const std::string& name, std::size_t corpus) {
    auto s = make_scheduler(name, kFeatures, 0);
    for (std::size_t i = 0; i < corpus; ++i) {
      const std::vector<std::uint32_t> f{static_cast<std::uint32_t>(i % kFeatures)};
      s->observe({.id = i, .size = 1 + i % 7, .exec_time = 1.0, .features = f},
                 CoverageMap::from_features(kFeatures, f), true);
    }
    std::vector<double> costs;
    for (int t = 0; t < 50; ++t) {
      s->next();
      costs.push_back(static_cast<double>(s->last_select_ops()));
    }
    return costs;
  };
  for (const std::string name : {"rare-minus", "rare-plus", "sample", "greedy"}) {
    const auto small = summarize_costs(select_costs(name, 100));
    const auto large = summarize_costs(select_costs(name, 1000));
    EXPECT_EQ(small.mean, large.mean) << name;
    EXPECT_EQ(small.variance, 0.0) << name;
    EXPECT_EQ(large.variance, 0.0) << name;
  }
}

TEST(Overhead, CountersFromLog) {
  const BanditArmsEnv env{{0.4, 0.6}};
  const auto log = run_bandit_trial(env, make_scheduler("sample", 2, 0), 100, 0);
  const auto c = overhead_counters(log);
  EXPECT_EQ(c.update_count, 100u);
  const auto u = overhead_summary(c);
  EXPECT_EQ(u.mean, 1.0);
  EXPECT_EQ(u.variance, 0.0);
  EXPECT_EQ(summarize_costs(c.select_costs).mean, 6.0);
}

TEST(MeanRegret, Window) {
  TrialLog log;
  for (int t = 1; t <= 4; ++t) {
    TrialStep s;
    s.step = static_cast<std::uint64_t>(t);
    s.regret = t;
    log.steps.push_back(s);
  }
  EXPECT_DOUBLE_EQ(mean_regret(log, 1, 4), 2.5);
  EXPECT_DOUBLE_EQ(mean_regret(log, 3, 4), 3.5);
  EXPECT_THROW(mean_regret(log, 0, 4), Error);
  EXPECT_THROW(mean_regret(log, 2, 5), Error);
}
