#include "tsched/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "tsched/errors.hpp"

namespace tsched {

namespace {

std::vector<std::uint64_t> widen(const std::vector<std::uint32_t>& v) {
  return {v.begin(), v.end()};
}

std::vector<std::uint32_t> narrow(const std::vector<std::uint64_t>& v) {
  std::vector<std::uint32_t> out;
  out.reserve(v.size());
  for (const auto x : v) out.push_back(static_cast<std::uint32_t>(x));
  return out;
}

std::vector<std::uint64_t> bools_to_u64(const std::vector<bool>& v) {
  return {v.begin(), v.end()};
}

}  // namespace

void Campaign::save(SnapshotWriter& out) const {
  save_env(out);
  out.put("scheduler.name", scheduler_->name());
  out.put_u64("scheduler.k", scheduler_->k_size());
  out.put("env.rng", env_rng_.state());
  out.put_u64("steps_done", steps_done_);
  save_progress(out);
  scheduler_->save(out);
}

std::unique_ptr<Campaign> load_campaign(SnapshotReader& in) {
  const std::string kind = in.get("campaign");
  std::unique_ptr<Campaign> campaign;
  if (kind == "bandit") {
    BanditArmsEnv env{in.get_reals("env.arms")};
    const std::string name = in.get("scheduler.name");
    const auto k = in.get_u64("scheduler.k");
    campaign = std::make_unique<BanditCampaign>(std::move(env), make_scheduler(name, k, 0), 0);
  } else if (kind == "fuzz") {
    const auto policy = parse_interestingness(in.get("env.policy"));
    if (!policy) throw SnapshotError("snapshot: unknown interestingness policy");
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(in.get("env.target"));
    } catch (const nlohmann::json::exception& ex) {
      throw SnapshotError(std::string("snapshot: bad target record: ") + ex.what());
    }
    CfgTarget target = CfgTarget::from_json(doc);
    const std::string name = in.get("scheduler.name");
    const auto k = in.get_u64("scheduler.k");
    campaign =
        std::make_unique<FuzzCampaign>(std::move(target), make_scheduler(name, k, 0), 0, *policy);
  } else {
    throw SnapshotError("snapshot: unknown campaign kind '" + kind + "'");
  }
  campaign->env_rng_.restore(in.get("env.rng"));
  campaign->steps_done_ = in.get_u64("steps_done");
  campaign->load_progress(in);
  campaign->scheduler_->load(in);
  return campaign;
}

BanditCampaign::BanditCampaign(BanditArmsEnv env, std::unique_ptr<Scheduler> scheduler,
                               std::uint64_t seed)
    : Campaign(std::move(scheduler), seed), env_(std::move(env)) {
  if (env_.theta_star.empty()) throw ConfigError("bandit environment needs at least one arm");
  if (env_.theta_star.size() != scheduler_->k_size()) {
    throw DimensionError("bandit environment has " + std::to_string(env_.theta_star.size()) +
                         " arms but the scheduler has K=" + std::to_string(scheduler_->k_size()));
  }
  for (const double p : env_.theta_star) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("arm probabilities must lie in [0, 1]");
  }
  best_ = *std::max_element(env_.theta_star.begin(), env_.theta_star.end());
  for (std::uint32_t k = 0; k < env_.theta_star.size(); ++k) {
    scheduler_->admit(InputRecord{k, 1, 1.0, {k}, 0});
  }
}

TrialStep BanditCampaign::step() {
  TrialStep rec;
  rec.step = ++steps_done_;
  const auto arm = static_cast<std::uint32_t>(scheduler_->next());
  rec.select_ops = scheduler_->last_select_ops();
  rec.action = arm;
  rec.interesting = env_rng_.uniform01() < env_.theta_star.at(arm);
  rec.regret = best_ - env_.theta_star[arm];
  const std::uint32_t features[] = {arm};
  const auto cov = CoverageMap::from_features(env_.theta_star.size(), features);
  scheduler_->observe(InputRecord{arm, 1, 1.0, {arm}, 0}, cov, rec.interesting);
  rec.update_ops = scheduler_->last_update_ops();
  rec.covered_features = scheduler_->global().covered_count();
  rec.corpus_size = scheduler_->corpus().size();
  return rec;
}

void BanditCampaign::save_env(SnapshotWriter& out) const {
  out.put("campaign", "bandit");
  out.put_reals("env.arms", env_.theta_star);
}

void BanditCampaign::save_progress(SnapshotWriter& out) const { (void)out; }

void BanditCampaign::load_progress(SnapshotReader& in) { (void)in; }

FuzzCampaign::FuzzCampaign(CfgTarget target, std::unique_ptr<Scheduler> scheduler,
                           std::uint64_t seed, Interestingness policy)
    : Campaign(std::move(scheduler), seed),
      target_(std::move(target)),
      policy_(policy),
      global_(target_.size()),
      discovered_(target_.size(), false) {
  if (scheduler_->k_size() != target_.size()) {
    throw DimensionError("target has " + std::to_string(target_.size()) +
                         " edges but the scheduler has K=" + std::to_string(scheduler_->k_size()));
  }
  if (!scheduler_->corpus().empty()) throw Error("fuzz campaign needs a fresh scheduler");
  bootstrap();
}

InputRecord FuzzCampaign::synthesize(std::vector<std::uint32_t> features, const Edge& source) {
  InputRecord input;
  input.id = inputs_.size();
  const auto [tlo, thi] = source.time_range;
  input.exec_time = tlo + (thi - tlo) * env_rng_.uniform01();
  const auto [slo, shi] = source.size_range;
  input.size = slo + env_rng_.below(shi - slo + 1);
  input.features = std::move(features);
  return input;
}

void FuzzCampaign::bootstrap() {
  for (const auto root : target_.roots()) {
    InputRecord seed = synthesize({root}, target_.edge(root));
    const auto cov = CoverageMap::from_features(target_.size(), seed.features);
    absorb(global_, cov);
    discovered_[root] = true;
    inputs_.push_back(seed);
    scheduler_->observe(seed, cov, true);
  }
}

TrialStep FuzzCampaign::step() {
  TrialStep rec;
  rec.step = ++steps_done_;
  const InputId parent_id = scheduler_->next();
  rec.select_ops = scheduler_->last_select_ops();
  rec.action = parent_id;
  const InputRecord parent = inputs_.at(parent_id);

  std::vector<bool> closure(target_.size(), false);
  for (const auto f : parent.features) closure[f] = true;
  for (const auto& e : target_.edges()) {
    if (discovered_[e.id]) continue;
    const bool enabled = std::all_of(e.prereqs.begin(), e.prereqs.end(),
                                     [&](std::uint32_t pre) { return closure[pre]; });
    if (enabled && env_rng_.uniform01() < e.p) rec.unlocked.push_back(e.id);
  }

  if (rec.unlocked.empty()) {
    const auto cov = CoverageMap::from_features(target_.size(), parent.features);
    rec.interesting = classify_interesting(global_, cov, policy_);
    absorb(global_, cov);
    scheduler_->observe(parent, cov, rec.interesting);
  } else {
    std::vector<std::uint32_t> features = parent.features;
    features.insert(features.end(), rec.unlocked.begin(), rec.unlocked.end());
    std::sort(features.begin(), features.end());
    InputRecord child = synthesize(std::move(features), target_.edge(rec.unlocked.front()));
    const auto cov = CoverageMap::from_features(target_.size(), child.features);
    rec.interesting = classify_interesting(global_, cov, policy_);
    absorb(global_, cov);
    for (const auto e : rec.unlocked) discovered_[e] = true;
    inputs_.push_back(child);
    scheduler_->observe(child, cov, rec.interesting);
  }
  rec.update_ops = scheduler_->last_update_ops();
  rec.covered_features = global_.covered_count();
  rec.corpus_size = scheduler_->corpus().size();
  return rec;
}

void FuzzCampaign::save_env(SnapshotWriter& out) const {
  out.put("campaign", "fuzz");
  out.put("env.policy", to_string(policy_));
  out.put("env.target", target_.to_json().dump());
}

void FuzzCampaign::save_progress(SnapshotWriter& out) const {
  out.put_u64s("env.total_hits", global_.total_hits);
  out.put_u64s("env.seen_buckets",
               std::vector<std::uint64_t>(global_.seen_buckets.begin(), global_.seen_buckets.end()));
  out.put_u64s("env.discovered", bools_to_u64(discovered_));
  out.put_u64("env.inputs", inputs_.size());
  for (const auto& r : inputs_) {
    out.put_u64("env.input.size", r.size);
    out.put_real("env.input.exec_time", r.exec_time);
    out.put_u64s("env.input.features", widen(r.features));
  }
}

void FuzzCampaign::load_progress(SnapshotReader& in) {
  const std::size_t k = target_.size();
  global_.total_hits = in.get_u64s("env.total_hits");
  const auto buckets = in.get_u64s("env.seen_buckets");
  global_.seen_buckets.assign(buckets.begin(), buckets.end());
  const auto discovered = in.get_u64s("env.discovered");
  if (global_.total_hits.size() != k || global_.seen_buckets.size() != k || discovered.size() != k) {
    throw SnapshotError("snapshot: environment coverage has wrong length");
  }
  discovered_.assign(discovered.begin(), discovered.end());
  inputs_.clear();
  const auto n = in.get_u64("env.inputs");
  for (std::uint64_t i = 0; i < n; ++i) {
    InputRecord r;
    r.id = i;
    r.size = in.get_u64("env.input.size");
    r.exec_time = in.get_real("env.input.exec_time");
    r.features = narrow(in.get_u64s("env.input.features"));
    inputs_.push_back(std::move(r));
  }
}

TrialLog run_bandit_trial(const BanditArmsEnv& env, std::unique_ptr<Scheduler> scheduler,
                          std::uint64_t steps, std::uint64_t seed) {
  if (steps == 0) throw ConfigError("campaign length must be at least 1");
  TrialLog log;
  log.scheduler = std::string(scheduler->name());
  BanditCampaign campaign(env, std::move(scheduler), seed);
  log.initial_covered = campaign.scheduler().global().covered_count();
  log.steps.reserve(steps);
  for (std::uint64_t t = 0; t < steps; ++t) log.steps.push_back(campaign.step());
  return log;
}

TrialLog run_fuzz_campaign(const CfgTarget& target, std::unique_ptr<Scheduler> scheduler,
                           std::uint64_t iterations, std::uint64_t seed, Interestingness policy) {
  if (iterations == 0) throw ConfigError("campaign length must be at least 1");
  TrialLog log;
  log.scheduler = std::string(scheduler->name());
  FuzzCampaign campaign(target, std::move(scheduler), seed, policy);
  log.initial_covered = campaign.covered_count();
  log.steps.reserve(iterations);
  for (std::uint64_t t = 0; t < iterations; ++t) log.steps.push_back(campaign.step());
  return log;
}

std::vector<std::uint32_t> motivating_coverage(int a, int b) {
  // Feature index = source line - 3.
  std::vector<std::uint32_t> lines;
  if (a > 10) {
    lines.push_back(0);
    if (a > 20) {
      lines.push_back(1);
      if (b > 10) lines.push_back(2);
    }
  }
  lines.push_back(3);
  return lines;
}

std::vector<Fig2Row> replay_fig2() {
  static constexpr std::pair<int, int> kInputs[] = {{15, 0}, {25, 0}, {0, 15},
                                                    {0, 25}, {25, 5}, {25, 25}};
  constexpr std::size_t kFeatures = 4;
  TScheduler sched(Variant::kRareMinus, kFeatures, 0);

  std::vector<Fig2Row> rows;
  auto record = [&](int t) {
    const auto& post = sched.posterior();
    const auto pbar = compute_pbar(post);
    for (std::size_t k = 0; k < kFeatures; ++k) {
      rows.push_back(Fig2Row{t, static_cast<int>(k) + 3, post.alpha[k], post.beta[k], pbar[k]});
    }
  };

  record(0);
  int t = 0;
  for (const auto& [a, b] : kInputs) {
    ++t;
    InputRecord input;
    input.id = static_cast<InputId>(t);
    input.size = 1;
    input.exec_time = 1.0;
    input.features = motivating_coverage(a, b);
    const auto cov = CoverageMap::from_features(kFeatures, input.features);
    const bool interesting =
        classify_interesting(sched.global(), cov, Interestingness::kNewFeature);
    sched.observe(input, cov, interesting);
    record(t);
  }
  return rows;
}

const std::vector<Fig2Row>& fig2_reference() {
  // (t, line, alpha, beta, pbar) reference values for the worked example.
  static const std::vector<Fig2Row> rows = {
      {0, 3, 1, 1, 0.25}, {0, 4, 1, 1, 0.25}, {0, 5, 1, 1, 0.25}, {0, 6, 1, 1, 0.25},
      {1, 3, 2, 1, 0.29}, {1, 4, 1, 1, 0.21}, {1, 5, 1, 1, 0.21}, {1, 6, 2, 1, 0.29},
      {2, 3, 3, 1, 0.28}, {2, 4, 2, 1, 0.25}, {2, 5, 1, 1, 0.19}, {2, 6, 3, 1, 0.28},
      {3, 3, 3, 1, 0.30}, {3, 4, 2, 1, 0.26}, {3, 5, 1, 1, 0.20}, {3, 6, 3, 2, 0.24},
      {4, 3, 3, 1, 0.31}, {4, 4, 2, 1, 0.28}, {4, 5, 1, 1, 0.21}, {4, 6, 3, 3, 0.21},
      {5, 3, 3, 2, 0.29}, {5, 4, 2, 2, 0.24}, {5, 5, 1, 1, 0.24}, {5, 6, 3, 4, 0.24},
      {6, 3, 4, 2, 0.27}, {6, 4, 3, 2, 0.25}, {6, 5, 2, 1, 0.27}, {6, 6, 3, 5, 0.21},
  };
  return rows;
}

std::vector<std::string> compare_fig2(const std::vector<Fig2Row>& rows) {
  const auto& ref = fig2_reference();
  std::vector<std::string> issues;
  if (rows.size() != ref.size()) {
    issues.push_back("expected " + std::to_string(ref.size()) + " cells, got " +
                     std::to_string(rows.size()));
    return issues;
  }
  char buf[160];
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const auto& got = rows[i];
    const auto& want = ref[i];
    if (got.t != want.t || got.line != want.line) {
      issues.push_back("row order differs at index " + std::to_string(i));
      continue;
    }
    if (got.alpha != want.alpha || got.beta != want.beta) {
      std::snprintf(buf, sizeof buf, "t=%d line %d: (alpha,beta)=(%g,%g), reference (%g,%g)",
                    got.t, got.line, got.alpha, got.beta, want.alpha, want.beta);
      issues.emplace_back(buf);
    }
    if (std::abs(got.pbar - want.pbar) > 0.005) {
      std::snprintf(buf, sizeof buf, "t=%d line %d: pbar=%.4f, reference %.2f (|diff| > 0.005)",
                    got.t, got.line, got.pbar, want.pbar);
      issues.emplace_back(buf);
    }
  }
  return issues;
}

}  // namespace tsched
