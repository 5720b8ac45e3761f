#include "tsched/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tsched/errors.hpp"
#include "tsched/rng.hpp"

namespace tsched {

namespace {

// Midranks of the pooled sample; ranks are 1-based.
std::vector<double> midranks(const std::vector<double>& pooled, double* tie_term) {
  const std::size_t n = pooled.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return pooled[i] < pooled[j]; });
  std::vector<double> ranks(n);
  double ties = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    const double t = static_cast<double>(j - i + 1);
    ties += t * t * t - t;
    i = j + 1;
  }
  if (tie_term) *tie_term = ties;
  return ranks;
}

// Exact two-sided p for the rank sum of a size-`m` subset of the pooled
// midranks, by dynamic programming over (subset size, doubled rank sum).
double exact_p_value(const std::vector<double>& ranks, std::size_t m, double observed_sum) {
  const std::size_t n = ranks.size();
  std::vector<long> doubled(n);
  for (std::size_t i = 0; i < n; ++i) doubled[i] = std::lround(2.0 * ranks[i]);
  std::vector<long> largest = doubled;
  std::sort(largest.rbegin(), largest.rend());
  const long max_sum = std::accumulate(largest.begin(), largest.begin() + static_cast<long>(m), 0L);
  const std::size_t width = static_cast<std::size_t>(max_sum) + 1;
  // ways[c][s]: number of size-c subsets with doubled rank sum s.
  std::vector<std::vector<long double>> ways(m + 1, std::vector<long double>(width, 0.0L));
  ways[0][0] = 1.0L;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t top = std::min(m, i + 1);
    for (std::size_t c = top; c >= 1; --c) {
      auto& dst = ways[c];
      const auto& src = ways[c - 1];
      const auto d = static_cast<std::size_t>(doubled[i]);
      for (std::size_t s = width; s-- > d;) {
        if (src[s - d] != 0.0L) dst[s] += src[s - d];
      }
    }
  }
  long double total = 0.0L;
  for (const auto w : ways[m]) total += w;
  const double expected = static_cast<double>(m) * static_cast<double>(n + 1);  // doubled mean
  const double observed_dev = std::abs(2.0 * observed_sum - expected);
  long double tail = 0.0L;
  for (std::size_t s = 0; s < width; ++s) {
    if (ways[m][s] == 0.0L) continue;
    if (std::abs(static_cast<double>(s) - expected) >= observed_dev - 1e-9) tail += ways[m][s];
  }
  return std::min(1.0, static_cast<double>(tail / total));
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

}  // namespace

double mean(std::span<const double> xs) {
  if (xs.empty()) throw Error("mean of an empty sample");
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

CoverageTimeline coverage_timeline(const TrialLog& log, std::uint64_t interval) {
  if (interval == 0) throw ConfigError("sampling interval must be positive");
  CoverageTimeline tl;
  tl.points.emplace_back(0.0, static_cast<double>(log.initial_covered));
  for (const auto& s : log.steps) {
    if (s.step % interval == 0 || &s == &log.steps.back()) {
      tl.points.emplace_back(static_cast<double>(s.step), static_cast<double>(s.covered_features));
    }
  }
  return tl;
}

double auc(const CoverageTimeline& timeline) {
  const auto& pts = timeline.points;
  if (pts.size() < 2) throw Error("auc: need at least two samples");
  double area = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double dx = pts[i].first - pts[i - 1].first;
    if (!(dx > 0.0)) throw Error("auc: sample steps must be strictly increasing");
    area += 0.5 * dx * (pts[i].second + pts[i - 1].second);
  }
  return area;
}

MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw Error("mann_whitney_u: both samples must be non-empty");
  const std::size_t n1 = a.size();
  const std::size_t n2 = b.size();
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  double tie_term = 0.0;
  const auto ranks = midranks(pooled, &tie_term);
  const double rank_sum_a = std::accumulate(ranks.begin(), ranks.begin() + n1, 0.0);

  MannWhitneyResult out;
  out.u = rank_sum_a - static_cast<double>(n1) * static_cast<double>(n1 + 1) / 2.0;

  if (n1 < 8 || n2 < 8) {
    // Enumerate subsets of the smaller sample's size.
    if (n1 <= n2) {
      out.p_value = exact_p_value(ranks, n1, rank_sum_a);
    } else {
      std::vector<double> swapped(ranks.begin() + n1, ranks.end());
      swapped.insert(swapped.end(), ranks.begin(), ranks.begin() + n1);
      const double rank_sum_b = std::accumulate(ranks.begin() + n1, ranks.end(), 0.0);
      out.p_value = exact_p_value(swapped, n2, rank_sum_b);
    }
    return out;
  }

  const double nn = static_cast<double>(n1 + n2);
  const double mu = static_cast<double>(n1) * static_cast<double>(n2) / 2.0;
  const double var = static_cast<double>(n1) * static_cast<double>(n2) / 12.0 *
                     ((nn + 1.0) - tie_term / (nn * (nn - 1.0)));
  if (!(var > 0.0)) {
    out.p_value = 1.0;
    return out;
  }
  const double z = std::max(0.0, std::abs(out.u - mu) - 0.5) / std::sqrt(var);
  out.p_value = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  return out;
}

std::pair<double, double> bootstrap_ci(std::span<const double> samples, double confidence,
                                       std::size_t resamples, std::uint64_t seed) {
  if (samples.size() < 2) throw Error("bootstrap_ci: need at least two samples");
  if (!(confidence > 0.0 && confidence < 1.0)) throw Error("bootstrap_ci: confidence must be in (0,1)");
  if (resamples == 0) throw Error("bootstrap_ci: resamples must be positive");
  SeededRng rng(seed);
  std::vector<double> means(resamples);
  const std::size_t n = samples.size();
  for (auto& m : means) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += samples[rng.below(n)];
    m = sum / static_cast<double>(n);
  }
  std::sort(means.begin(), means.end());
  const double tail = (1.0 - confidence) / 2.0;
  return {quantile_sorted(means, tail), quantile_sorted(means, 1.0 - tail)};
}

double consistency(std::uint64_t total, std::uint64_t unique, std::uint64_t trials) {
  if (unique == 0 || trials == 0) throw Error("consistency: unique and trials must be positive");
  return static_cast<double>(total) / static_cast<double>(unique) / static_cast<double>(trials);
}

OverheadCounters overhead_counters(const TrialLog& log) {
  OverheadCounters c;
  for (const auto& s : log.steps) {
    ++c.update_count;
    c.update_costs.push_back(static_cast<double>(s.update_ops));
    c.select_costs.push_back(static_cast<double>(s.select_ops));
  }
  return c;
}

CostSummary summarize_costs(std::span<const double> costs) {
  if (costs.empty()) throw Error("overhead summary of an empty sample");
  CostSummary s;
  s.count = costs.size();
  s.mean = mean(costs);
  double acc = 0.0;
  for (const double c : costs) acc += (c - s.mean) * (c - s.mean);
  s.variance = acc / static_cast<double>(costs.size());
  return s;
}

CostSummary overhead_summary(const OverheadCounters& counters) {
  return summarize_costs(counters.update_costs);
}

double mean_regret(const TrialLog& log, std::uint64_t first, std::uint64_t last) {
  if (first == 0 || first > last || last > log.steps.size()) {
    throw Error("mean_regret: window out of range");
  }
  double sum = 0.0;
  for (std::uint64_t t = first; t <= last; ++t) {
    const auto& r = log.steps[t - 1].regret;
    if (!r) throw Error("mean_regret: log carries no regret (not a bandit trial)");
    sum += *r;
  }
  return sum / static_cast<double>(last - first + 1);
}

}  // namespace tsched
