#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tsched/coverage.hpp"
#include "tsched/simulator.hpp"
#include "tsched/target.hpp"

namespace tsched {

// Config file (JSON, unknown keys rejected):
//
//   {
//     "environment": {"arms": [0.7, 0.8, 0.9]}  |  {"target": "path/to/target.json"},
//     "schedulers": ["greedy", "sample"],
//     "trials": 100,
//     "steps": 1000,
//     "seed": 0,                       // optional; trial i uses seed + i
//     "output_dir": "out",
//     "sampling_interval": 100,        // optional
//     "interestingness": "new-feature",// optional: "new-feature" | "new-bucket"
//     "snapshot_at": 500               // optional: snapshot every trial after this step
//   }
struct ExperimentConfig {
  std::optional<BanditArmsEnv> arms;
  std::optional<std::filesystem::path> target_path;
  std::vector<std::string> schedulers;
  std::uint64_t trials = 1;
  std::uint64_t steps = 1;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir;
  std::uint64_t sampling_interval = 100;
  Interestingness interestingness = Interestingness::kNewFeature;
  std::optional<std::uint64_t> snapshot_at;
};

// Throws ConfigError on schema violations.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

struct SummaryRow {
  std::string scheduler;
  std::uint64_t trials = 0;
  double final_cov_mean = 0.0;
  std::optional<std::pair<double, double>> final_cov_ci;
  double auc_mean = 0.0;
  std::optional<std::pair<double, double>> auc_ci;
  std::optional<double> mean_final_regret;
  std::optional<double> mwu_p_vs_baseline;
};

struct ExperimentResult {
  std::vector<TrialLog> logs;  // scheduler-major, then trial
  std::vector<SummaryRow> summary;
  std::vector<std::string> snapshots;  // parallel to logs; empty unless snapshot_at is set
};

// Runs every (scheduler, trial) pair. Trials are independent and may execute
// on up to `jobs` threads; aggregation happens after all of them finish.
ExperimentResult run_experiment(const ExperimentConfig& config, unsigned jobs = 1);

// run_experiment + write trials/<scheduler>-trial<i>.csv and summary.csv under
// config.output_dir (and snapshots/ when snapshot_at is set).
ExperimentResult simulate(const ExperimentConfig& config, unsigned jobs = 1);

// Final-window length used for regret summaries: the last tenth of the campaign.
std::uint64_t final_window(std::uint64_t steps);

void write_trial_csv_header(std::ostream& out);
void write_trial_csv_rows(std::ostream& out, const TrialLog& log);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

std::filesystem::path trial_csv_path(const std::filesystem::path& dir, const std::string& scheduler,
                                     std::uint64_t trial);
std::filesystem::path snapshot_path(const std::filesystem::path& dir, const std::string& scheduler,
                                    std::uint64_t trial);

// Campaign snapshot file with trial metadata; see Campaign::save.
std::string make_trial_snapshot(const Campaign& campaign, std::uint64_t trial,
                                std::uint64_t total_steps);

// Loads a snapshot written during simulate and runs the campaign to its
// configured end. The returned log holds only the steps after the snapshot.
TrialLog resume_from_snapshot(const std::string& snapshot_text);

}  // namespace tsched
