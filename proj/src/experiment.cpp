#include "tsched/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

#include "tsched/errors.hpp"
#include "tsched/metrics.hpp"

namespace tsched {

namespace {

using nlohmann::json;

const std::set<std::string> kConfigKeys = {
    "environment", "schedulers",       "trials",          "steps",      "seed",
    "output_dir",  "sampling_interval", "interestingness", "snapshot_at"};

constexpr double kConfidence = 0.95;
constexpr std::size_t kResamples = 10000;

std::uint64_t require_positive(const json& doc, const char* key) {
  const auto& v = doc.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 1) {
    throw ConfigError(std::string("'") + key + "' must be a positive integer");
  }
  return v.get<std::uint64_t>();
}

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string format_optional(const std::optional<double>& v) {
  return v ? format_value(*v) : std::string();
}

struct Environment {
  std::optional<BanditArmsEnv> arms;
  std::optional<CfgTarget> target;

  std::size_t k_size() const { return arms ? arms->theta_star.size() : target->size(); }
};

Environment load_environment(const ExperimentConfig& config) {
  Environment env;
  if (config.arms) {
    env.arms = config.arms;
  } else {
    env.target = CfgTarget::load(*config.target_path);
  }
  return env;
}

std::unique_ptr<Campaign> make_campaign(const Environment& env, const ExperimentConfig& config,
                                        const std::string& scheduler, std::uint64_t trial) {
  const std::uint64_t trial_seed = config.seed + trial;
  auto sched = make_scheduler(scheduler, env.k_size(), mix_seed(trial_seed, 1));
  const std::uint64_t env_seed = mix_seed(trial_seed, 2);
  if (env.arms) return std::make_unique<BanditCampaign>(*env.arms, std::move(sched), env_seed);
  return std::make_unique<FuzzCampaign>(*env.target, std::move(sched), env_seed,
                                        config.interestingness);
}

std::size_t initial_covered(const Campaign& campaign) {
  if (const auto* fuzz = dynamic_cast<const FuzzCampaign*>(&campaign)) return fuzz->covered_count();
  return campaign.scheduler().global().covered_count();
}

std::optional<std::pair<double, double>> maybe_ci(const std::vector<double>& xs,
                                                  std::uint64_t seed) {
  if (xs.size() < 2) return std::nullopt;
  return bootstrap_ci(xs, kConfidence, kResamples, seed);
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (!kConfigKeys.contains(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  ExperimentConfig cfg;
  try {
    const auto& env = doc.at("environment");
    if (!env.is_object() || env.size() != 1) {
      throw ConfigError("'environment' must hold exactly one of 'arms' or 'target'");
    }
    if (env.contains("arms")) {
      BanditArmsEnv arms{env.at("arms").get<std::vector<double>>()};
      if (arms.theta_star.empty()) throw ConfigError("'arms' must not be empty");
      for (const double p : arms.theta_star) {
        if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("arm probabilities must lie in [0, 1]");
      }
      cfg.arms = std::move(arms);
    } else if (env.contains("target")) {
      cfg.target_path = env.at("target").get<std::string>();
    } else {
      throw ConfigError("unknown environment key '" + env.begin().key() + "'");
    }

    cfg.schedulers = doc.at("schedulers").get<std::vector<std::string>>();
    if (cfg.schedulers.empty()) throw ConfigError("'schedulers' must not be empty");
    std::set<std::string> seen;
    for (const auto& name : cfg.schedulers) {
      if (!is_scheduler_name(name)) throw ConfigError("unknown scheduler '" + name + "'");
      if (!seen.insert(name).second) throw ConfigError("scheduler '" + name + "' listed twice");
    }

    cfg.trials = require_positive(doc, "trials");
    cfg.steps = require_positive(doc, "steps");
    if (doc.contains("seed")) cfg.seed = doc.at("seed").get<std::uint64_t>();
    cfg.output_dir = doc.at("output_dir").get<std::string>();
    if (doc.contains("sampling_interval")) cfg.sampling_interval = require_positive(doc, "sampling_interval");
    if (doc.contains("interestingness")) {
      const auto name = doc.at("interestingness").get<std::string>();
      const auto policy = parse_interestingness(name);
      if (!policy) throw ConfigError("unknown interestingness policy '" + name + "'");
      cfg.interestingness = *policy;
    }
    if (doc.contains("snapshot_at")) {
      cfg.snapshot_at = require_positive(doc, "snapshot_at");
      if (*cfg.snapshot_at >= cfg.steps) throw ConfigError("'snapshot_at' must be below 'steps'");
    }
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("invalid config: ") + ex.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& ex) {
    throw ConfigError("config file " + path.string() + ": " + ex.what());
  }
  return parse_config(doc);
}

std::uint64_t final_window(std::uint64_t steps) { return std::max<std::uint64_t>(1, steps / 10); }

std::string make_trial_snapshot(const Campaign& campaign, std::uint64_t trial,
                                std::uint64_t total_steps) {
  SnapshotWriter out;
  out.put_u64("trial", trial);
  out.put_u64("total_steps", total_steps);
  campaign.save(out);
  return out.finish();
}

TrialLog resume_from_snapshot(const std::string& snapshot_text) {
  auto in = SnapshotReader::parse(snapshot_text);
  TrialLog log;
  log.trial = in.get_u64("trial");
  const auto total = in.get_u64("total_steps");
  auto campaign = load_campaign(in);
  log.scheduler = std::string(campaign->scheduler().name());
  log.initial_covered = campaign->scheduler().global().covered_count();
  while (campaign->steps_done() < total) log.steps.push_back(campaign->step());
  return log;
}

ExperimentResult run_experiment(const ExperimentConfig& config, unsigned jobs) {
  const Environment env = load_environment(config);
  const std::size_t n_jobs = config.schedulers.size() * config.trials;
  ExperimentResult result;
  result.logs.resize(n_jobs);
  std::vector<std::string> snapshots(config.snapshot_at ? n_jobs : 0);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t j = next++; j < n_jobs; j = next++) {
      try {
        const auto& name = config.schedulers[j / config.trials];
        const std::uint64_t trial = j % config.trials;
        auto campaign = make_campaign(env, config, name, trial);
        TrialLog log;
        log.scheduler = name;
        log.trial = trial;
        log.initial_covered = initial_covered(*campaign);
        log.steps.reserve(config.steps);
        for (std::uint64_t t = 0; t < config.steps; ++t) {
          log.steps.push_back(campaign->step());
          if (config.snapshot_at && campaign->steps_done() == *config.snapshot_at) {
            snapshots[j] = make_trial_snapshot(*campaign, trial, config.steps);
          }
        }
        result.logs[j] = std::move(log);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned n_threads =
      std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(1, n_jobs))));
  {
    std::vector<std::jthread> pool;
    for (unsigned i = 1; i < n_threads; ++i) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);

  // Aggregation.
  const bool bandit = env.arms.has_value();
  const std::uint64_t window = final_window(config.steps);
  std::vector<double> baseline_metric;
  for (std::size_t s = 0; s < config.schedulers.size(); ++s) {
    SummaryRow row;
    row.scheduler = config.schedulers[s];
    row.trials = config.trials;
    std::vector<double> final_cov;
    std::vector<double> aucs;
    std::vector<double> regrets;
    for (std::uint64_t i = 0; i < config.trials; ++i) {
      const auto& log = result.logs[s * config.trials + i];
      final_cov.push_back(static_cast<double>(log.steps.back().covered_features));
      aucs.push_back(auc(coverage_timeline(log, config.sampling_interval)));
      if (bandit) regrets.push_back(mean_regret(log, config.steps - window + 1, config.steps));
    }
    const std::uint64_t ci_seed = mix_seed(config.seed, 100 + s);
    row.final_cov_mean = mean(final_cov);
    row.final_cov_ci = maybe_ci(final_cov, ci_seed);
    row.auc_mean = mean(aucs);
    row.auc_ci = maybe_ci(aucs, ci_seed + 1);
    if (bandit) row.mean_final_regret = mean(regrets);
    // Bandit runs are compared on final-window regret, target runs on final coverage.
    const std::vector<double>& metric = bandit ? regrets : final_cov;
    if (s == 0) {
      baseline_metric = metric;
    } else {
      row.mwu_p_vs_baseline = mann_whitney_u(metric, baseline_metric).p_value;
    }
    result.summary.push_back(std::move(row));
  }

  result.snapshots = std::move(snapshots);
  return result;
}

ExperimentResult simulate(const ExperimentConfig& config, unsigned jobs) {
  std::error_code ec;
  std::filesystem::create_directories(config.output_dir / "trials", ec);
  if (ec) throw Error("cannot create output directory " + config.output_dir.string() + ": " + ec.message());
  auto result = run_experiment(config, jobs);
  for (const auto& log : result.logs) {
    const auto path = trial_csv_path(config.output_dir, log.scheduler, log.trial);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    write_trial_csv_header(out);
    write_trial_csv_rows(out, log);
  }
  const auto summary_path = config.output_dir / "summary.csv";
  std::ofstream out(summary_path, std::ios::binary);
  if (!out) throw Error("cannot write " + summary_path.string());
  write_summary_csv(out, result.summary);
  if (!result.snapshots.empty()) {
    std::filesystem::create_directories(config.output_dir / "snapshots");
    for (std::size_t j = 0; j < result.logs.size(); ++j) {
      const auto& log = result.logs[j];
      const auto path = snapshot_path(config.output_dir, log.scheduler, log.trial);
      std::ofstream snap(path, std::ios::binary);
      if (!snap) throw Error("cannot write " + path.string());
      snap << result.snapshots[j];
    }
  }
  return result;
}

void write_trial_csv_header(std::ostream& out) {
  out << "step,scheduler,trial,action,interesting,regret,covered_features,corpus_size,"
         "select_ops,update_ops\n";
}

void write_trial_csv_rows(std::ostream& out, const TrialLog& log) {
  for (const auto& s : log.steps) {
    out << s.step << ',' << log.scheduler << ',' << log.trial << ',' << s.action << ','
        << (s.interesting ? 1 : 0) << ',' << format_optional(s.regret) << ',' << s.covered_features
        << ',' << s.corpus_size << ',' << s.select_ops << ',' << s.update_ops << '\n';
  }
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "scheduler,trials,final_cov_mean,final_cov_ci_lo,final_cov_ci_hi,auc_mean,auc_ci_lo,"
         "auc_ci_hi,mean_final_regret,mwu_p_vs_baseline\n";
  auto lo = [](const auto& ci) { return ci ? format_value(ci->first) : std::string(); };
  auto hi = [](const auto& ci) { return ci ? format_value(ci->second) : std::string(); };
  for (const auto& r : rows) {
    out << r.scheduler << ',' << r.trials << ',' << format_value(r.final_cov_mean) << ','
        << lo(r.final_cov_ci) << ',' << hi(r.final_cov_ci) << ',' << format_value(r.auc_mean)
        << ',' << lo(r.auc_ci) << ',' << hi(r.auc_ci) << ',' << format_optional(r.mean_final_regret)
        << ',' << format_optional(r.mwu_p_vs_baseline) << '\n';
  }
}

std::filesystem::path trial_csv_path(const std::filesystem::path& dir, const std::string& scheduler,
                                     std::uint64_t trial) {
  return dir / "trials" / (scheduler + "-trial" + std::to_string(trial) + ".csv");
}

std::filesystem::path snapshot_path(const std::filesystem::path& dir, const std::string& scheduler,
                                    std::uint64_t trial) {
  return dir / "snapshots" / (scheduler + "-trial" + std::to_string(trial) + ".snap");
}

}  // namespace tsched
