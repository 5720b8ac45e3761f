// tsched: experiment runner for the seed schedulers.
//
//   tsched simulate --config PATH [--jobs N]
//   tsched replay-fig2 [--csv PATH]
//   tsched resume --snapshot PATH [--out PATH]
//
// Exit codes: 0 success, 1 replay differs from the reference trace,
// 2 config error, 3 runtime error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "tsched/errors.hpp"
#include "tsched/experiment.hpp"
#include "tsched/simulator.hpp"

namespace {

constexpr int kExitMismatch = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

int cmd_simulate(const std::string& config_path, unsigned jobs) {
  const auto config = tsched::load_config(config_path);
  const auto result = tsched::simulate(config, jobs);
  std::cout << "wrote " << result.logs.size() << " trial logs and summary.csv to "
            << config.output_dir.string() << "\n";
  tsched::write_summary_csv(std::cout, result.summary);
  return 0;
}

int cmd_replay_fig2(const std::string& csv_path) {
  const auto rows = tsched::replay_fig2();
  std::printf("%2s  %4s  %5s  %5s  %5s\n", "t", "line", "alpha", "beta", "pbar");
  for (const auto& r : rows) {
    std::printf("%2d  %4d  %5.0f  %5.0f  %5.2f\n", r.t, r.line, r.alpha, r.beta, r.pbar);
  }
  if (!csv_path.empty()) {
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw tsched::Error("cannot write " + csv_path);
    out << "t,line,alpha,beta,pbar\n";
    char buf[64];
    for (const auto& r : rows) {
      std::snprintf(buf, sizeof buf, "%d,%d,%.0f,%.0f,%.2f\n", r.t, r.line, r.alpha, r.beta, r.pbar);
      out << buf;
    }
  }
  const auto issues = tsched::compare_fig2(rows);
  for (const auto& issue : issues) std::cerr << "mismatch: " << issue << "\n";
  return issues.empty() ? 0 : kExitMismatch;
}

int cmd_resume(const std::string& snapshot, const std::string& out_path) {
  std::ifstream in(snapshot, std::ios::binary);
  if (!in) throw tsched::SnapshotError("cannot open snapshot " + snapshot);
  std::ostringstream text;
  text << in.rdbuf();
  const auto log = tsched::resume_from_snapshot(text.str());
  if (out_path.empty()) {
    tsched::write_trial_csv_header(std::cout);
    tsched::write_trial_csv_rows(std::cout, log);
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw tsched::Error("cannot write " + out_path);
    tsched::write_trial_csv_header(out);
    tsched::write_trial_csv_rows(out, log);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Thompson-sampling seed scheduler simulations"};
  app.require_subcommand(1);

  std::string config_path;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  auto* simulate = app.add_subcommand("simulate", "run a configured experiment");
  simulate->add_option("--config", config_path, "experiment config (JSON)")->required();
  simulate->add_option("--jobs", jobs, "parallel trials")->check(CLI::PositiveNumber);

  std::string csv_path;
  auto* replay = app.add_subcommand("replay-fig2", "replay the six-input motivating example");
  replay->add_option("--csv", csv_path, "also write the table as CSV");

  std::string snapshot;
  std::string out_path;
  auto* resume = app.add_subcommand("resume", "continue a trial from a snapshot");
  resume->add_option("--snapshot", snapshot, "snapshot file")->required();
  resume->add_option("--out", out_path, "CSV for the remaining steps (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*simulate) return cmd_simulate(config_path, jobs);
    if (*replay) return cmd_replay_fig2(csv_path);
    if (*resume) return cmd_resume(snapshot, out_path);
  } catch (const tsched::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const tsched::TargetError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitRuntime;
}
