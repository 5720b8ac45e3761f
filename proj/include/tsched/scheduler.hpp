#pragma once

// Seed schedulers. Every scheduler sees the campaign only through observe()
// (an executed input, its coverage map and whether it was interesting) and
// answers next() with the id of a retained input to fuzz.

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "tsched/bandit.hpp"
#include "tsched/coverage.hpp"
#include "tsched/rng.hpp"
#include "tsched/snapshot.hpp"

namespace tsched {

class Scheduler {
 public:
  Scheduler(std::size_t k_size, std::uint64_t seed);
  virtual ~Scheduler() = default;

  Scheduler(const Scheduler&) = delete;
  Scheduler& operator=(const Scheduler&) = delete;

  virtual std::string_view name() const = 0;

  // Adds an input to the corpus without any reward feedback, making it
  // selectable. Used for environments whose arms exist before step 1.
  void admit(const InputRecord& input);

  // Absorbs the execution into global coverage; retains `input` iff
  // `interesting`.
  void observe(const InputRecord& input, const CoverageMap& cov, bool interesting);

  // Id of the next retained input to fuzz; bumps its times_fuzzed.
  InputId next();

  std::size_t k_size() const { return k_size_; }
  const Corpus& corpus() const { return corpus_; }
  const GlobalCoverage& global() const { return global_; }

  // Abstract op counts of the most recent next() / observe() calls.
  std::uint64_t last_select_ops() const { return last_select_ops_; }
  std::uint64_t last_update_ops() const { return last_update_ops_; }

  void save(SnapshotWriter& out) const;
  void load(SnapshotReader& in);

 protected:
  virtual void on_admit(const InputRecord& input) { (void)input; }
  // Returns the update op count.
  virtual std::uint64_t on_observe(const InputRecord& input, const CoverageMap& cov,
                                   bool interesting) = 0;
  virtual InputId pick(std::uint64_t& ops) = 0;
  virtual void save_state(SnapshotWriter& out) const { (void)out; }
  virtual void load_state(SnapshotReader& in) { (void)in; }

  SeededRng& rng() { return rng_; }

 private:
  std::size_t k_size_;
  SeededRng rng_;
  Corpus corpus_;
  GlobalCoverage global_;
  std::uint64_t last_select_ops_ = 0;
  std::uint64_t last_update_ops_ = 0;
};

// Shared bookkeeping for schedulers that choose among coverage features:
// Beta posterior per feature plus the favored-input table.
class FeatureScheduler : public Scheduler {
 public:
  FeatureScheduler(std::size_t k_size, std::uint64_t seed);

  const PosteriorState& posterior() const { return posterior_; }
  const FavoredTable& favored() const { return favored_; }

 protected:
  void on_admit(const InputRecord& input) override;
  std::uint64_t on_observe(const InputRecord& input, const CoverageMap& cov,
                           bool interesting) override;
  void save_state(SnapshotWriter& out) const override;
  void load_state(SnapshotReader& in) override;

  PosteriorState posterior_;
  FavoredTable favored_;
};

// Thompson-sampling scheduler. Needs only K and a seed; there is nothing to tune.
class TScheduler final : public FeatureScheduler {
 public:
  TScheduler(Variant variant, std::size_t k_size, std::uint64_t seed);

  std::string_view name() const override { return to_string(variant_); }
  Variant variant() const { return variant_; }

  // Replaces the rng-backed Beta source (tests only).
  void set_variate_source(std::unique_ptr<VariateSource> source) { override_ = std::move(source); }

 protected:
  InputId pick(std::uint64_t& ops) override;

 private:
  Variant variant_;
  std::unique_ptr<VariateSource> override_;
};

// Always takes the feature with the highest posterior mean.
class GreedyScheduler final : public FeatureScheduler {
 public:
  GreedyScheduler(std::size_t k_size, std::uint64_t seed) : FeatureScheduler(k_size, seed) {}
  std::string_view name() const override { return "greedy"; }

 protected:
  InputId pick(std::uint64_t& ops) override;
};

class UniformScheduler final : public Scheduler {
 public:
  using Scheduler::Scheduler;
  std::string_view name() const override { return "uniform"; }

 protected:
  std::uint64_t on_observe(const InputRecord&, const CoverageMap&, bool) override { return 0; }
  InputId pick(std::uint64_t& ops) override;
};

class RoundRobinScheduler final : public Scheduler {
 public:
  using Scheduler::Scheduler;
  std::string_view name() const override { return "round-robin"; }

 protected:
  std::uint64_t on_observe(const InputRecord&, const CoverageMap&, bool) override { return 0; }
  InputId pick(std::uint64_t& ops) override;
  void save_state(SnapshotWriter& out) const override;
  void load_state(SnapshotReader& in) override;

 private:
  std::size_t cursor_ = 0;
};

const std::vector<std::string>& scheduler_names();
bool is_scheduler_name(std::string_view name);

// Throws ConfigError for names outside scheduler_names().
std::unique_ptr<Scheduler> make_scheduler(std::string_view name, std::size_t k_size,
                                          std::uint64_t seed);

}  // namespace tsched
