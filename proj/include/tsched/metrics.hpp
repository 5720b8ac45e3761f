#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "tsched/simulator.hpp"

namespace tsched {

// (step, covered-feature count) samples; steps strictly increasing.
struct CoverageTimeline {
  std::vector<std::pair<double, double>> points;
};

// Samples at step 0 (post-bootstrap), every `interval` steps, and the final step.
CoverageTimeline coverage_timeline(const TrialLog& log, std::uint64_t interval);

// Trapezoidal area under the timeline. Needs at least two samples.
double auc(const CoverageTimeline& timeline);

struct MannWhitneyResult {
  double u = 0.0;        // pairs (x in a, y in b) with x > y, ties count 1/2
  double p_value = 1.0;  // two-sided
};

// U from midranks. p from the exact permutation distribution of the rank sum
// when either sample has fewer than 8 values, otherwise from the normal
// approximation with tie and continuity correction.
MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b);

// Percentile bootstrap interval for the mean.
std::pair<double, double> bootstrap_ci(std::span<const double> samples, double confidence,
                                       std::size_t resamples, std::uint64_t seed);

// total / unique / trials.
double consistency(std::uint64_t total, std::uint64_t unique, std::uint64_t trials);

// Abstract op counts; a select costs (variates drawn + posterior entries read),
// an update costs the number of posterior entries touched.
struct OverheadCounters {
  std::uint64_t update_count = 0;
  std::vector<double> update_costs;
  std::vector<double> select_costs;
};

OverheadCounters overhead_counters(const TrialLog& log);

struct CostSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;  // population
};

CostSummary summarize_costs(std::span<const double> costs);
// Summary of the per-update costs.
CostSummary overhead_summary(const OverheadCounters& counters);

// Mean instantaneous regret over steps [first, last] (1-based, inclusive).
double mean_regret(const TrialLog& log, std::uint64_t first, std::uint64_t last);

double mean(std::span<const double> xs);

}  // namespace tsched
