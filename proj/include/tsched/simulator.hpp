#pragma once

// Ground-truth environments and the campaign loops that drive a scheduler
// through them. Environments own all latent quantities (arm probabilities,
// edge unlock probabilities); schedulers only ever see coverage maps and the
// interesting flag.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tsched/coverage.hpp"
#include "tsched/rng.hpp"
#include "tsched/scheduler.hpp"
#include "tsched/snapshot.hpp"
#include "tsched/target.hpp"

namespace tsched {

struct TrialStep {
  std::uint64_t step = 0;  // 1-based
  std::uint64_t action = 0;  // arm index (bandit) or input id (fuzz)
  bool interesting = false;
  std::optional<double> regret;  // bandit environments only
  std::size_t covered_features = 0;
  std::size_t corpus_size = 0;
  std::uint64_t select_ops = 0;
  std::uint64_t update_ops = 0;
  std::vector<std::uint32_t> unlocked;  // edges discovered at this step (fuzz only)
};

struct TrialLog {
  std::string scheduler;
  std::uint64_t trial = 0;
  std::size_t initial_covered = 0;  // after bootstrap, before step 1
  std::vector<TrialStep> steps;
};

struct BanditArmsEnv {
  std::vector<double> theta_star;
};

class Campaign {
 public:
  virtual ~Campaign() = default;

  virtual TrialStep step() = 0;

  std::uint64_t steps_done() const { return steps_done_; }
  Scheduler& scheduler() { return *scheduler_; }
  const Scheduler& scheduler() const { return *scheduler_; }

  // Serializes environment + scheduler + progress; see load_campaign().
  void save(SnapshotWriter& out) const;

 protected:
  explicit Campaign(std::unique_ptr<Scheduler> scheduler, std::uint64_t seed)
      : scheduler_(std::move(scheduler)), env_rng_(seed) {}

  virtual void save_env(SnapshotWriter& out) const = 0;
  virtual void load_progress(SnapshotReader& in) = 0;
  virtual void save_progress(SnapshotWriter& out) const = 0;

  friend std::unique_ptr<Campaign> load_campaign(SnapshotReader& in);

  std::unique_ptr<Scheduler> scheduler_;
  SeededRng env_rng_;
  std::uint64_t steps_done_ = 0;
};

// Each step the scheduler picks an arm; the arm pays off (the execution is
// interesting) with probability theta_star[arm]. All arms are admitted to the
// corpus before step 1 as inputs whose id equals the arm index.
class BanditCampaign final : public Campaign {
 public:
  BanditCampaign(BanditArmsEnv env, std::unique_ptr<Scheduler> scheduler, std::uint64_t seed);

  TrialStep step() override;
  const BanditArmsEnv& env() const { return env_; }

 protected:
  void save_env(SnapshotWriter& out) const override;
  void save_progress(SnapshotWriter& out) const override;
  void load_progress(SnapshotReader& in) override;

 private:
  BanditArmsEnv env_;
  double best_ = 0.0;
};

// Synthetic greybox loop over a CfgTarget. Bootstrap observes one seed per
// root edge. Each step mutates the scheduled input once: every undiscovered
// edge whose prerequisites are all covered by that input unlocks
// independently with its probability p. Any unlock yields a new input
// covering the parent's features plus the unlocked edges; otherwise the
// parent's coverage is re-observed.
class FuzzCampaign final : public Campaign {
 public:
  FuzzCampaign(CfgTarget target, std::unique_ptr<Scheduler> scheduler, std::uint64_t seed,
               Interestingness policy = Interestingness::kNewFeature);

  TrialStep step() override;
  const CfgTarget& target() const { return target_; }
  const std::vector<InputRecord>& inputs() const { return inputs_; }
  std::size_t covered_count() const { return global_.covered_count(); }

 protected:
  void save_env(SnapshotWriter& out) const override;
  void save_progress(SnapshotWriter& out) const override;
  void load_progress(SnapshotReader& in) override;

 private:
  InputRecord synthesize(std::vector<std::uint32_t> features, const Edge& source);
  void bootstrap();

  CfgTarget target_;
  Interestingness policy_;
  GlobalCoverage global_;
  std::vector<bool> discovered_;
  std::vector<InputRecord> inputs_;  // indexed by id
};

// Rebuilds a campaign (environment, scheduler, rng streams, progress) from a
// snapshot written by Campaign::save().
std::unique_ptr<Campaign> load_campaign(SnapshotReader& in);

TrialLog run_bandit_trial(const BanditArmsEnv& env, std::unique_ptr<Scheduler> scheduler,
                          std::uint64_t steps, std::uint64_t seed);

TrialLog run_fuzz_campaign(const CfgTarget& target, std::unique_ptr<Scheduler> scheduler,
                           std::uint64_t iterations, std::uint64_t seed,
                           Interestingness policy = Interestingness::kNewFeature);

// Motivating example: six (a, b) inputs fed to
//
//   void foo(int a, int b) {      // line 1
//     if (a > 10)                 // line 2
//       if (a > 20)               // line 3
//         if (b > 10)             // line 4
//           bug();                // line 5
//   }                             // line 6
//
// with features = lines 3..6 and posterior rows recorded after every input.
struct Fig2Row {
  int t = 0;
  int line = 0;
  double alpha = 1.0;
  double beta = 1.0;
  double pbar = 0.25;
};

std::vector<std::uint32_t> motivating_coverage(int a, int b);
std::vector<Fig2Row> replay_fig2();
// Reference (alpha, beta, pbar) trace for the same six inputs.
const std::vector<Fig2Row>& fig2_reference();
// Human-readable description of each cell where `rows` disagrees with the
// reference: alpha/beta must match exactly, pbar within +-0.005.
std::vector<std::string> compare_fig2(const std::vector<Fig2Row>& rows);

}  // namespace tsched
