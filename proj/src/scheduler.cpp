#include "tsched/scheduler.hpp"

#include <algorithm>

#include "tsched/errors.hpp"

namespace tsched {

namespace {

void save_input(SnapshotWriter& out, const InputRecord& r) {
  out.put_u64("input.id", r.id);
  out.put_u64("input.size", r.size);
  out.put_real("input.exec_time", r.exec_time);
  out.put_u64("input.times_fuzzed", r.times_fuzzed);
  out.put_u64s("input.features", std::vector<std::uint64_t>(r.features.begin(), r.features.end()));
}

InputRecord load_input(SnapshotReader& in) {
  InputRecord r;
  r.id = in.get_u64("input.id");
  r.size = in.get_u64("input.size");
  r.exec_time = in.get_real("input.exec_time");
  r.times_fuzzed = in.get_u64("input.times_fuzzed");
  for (const auto f : in.get_u64s("input.features")) r.features.push_back(static_cast<std::uint32_t>(f));
  return r;
}

}  // namespace

Scheduler::Scheduler(std::size_t k_size, std::uint64_t seed)
    : k_size_(k_size), rng_(seed), global_(k_size) {
  if (k_size == 0) throw DimensionError("scheduler: K must be at least 1");
}

void Scheduler::admit(const InputRecord& input) {
  for (const auto k : input.features) {
    if (k >= k_size_) throw DimensionError("admit: feature index out of range");
  }
  corpus_.retain(input);
  on_admit(input);
}

void Scheduler::observe(const InputRecord& input, const CoverageMap& cov, bool interesting) {
  if (cov.size() != k_size_) {
    throw DimensionError("observe: coverage map has " + std::to_string(cov.size()) +
                         " entries, expected " + std::to_string(k_size_));
  }
  absorb(global_, cov);
  if (interesting) corpus_.retain(input);
  last_update_ops_ = on_observe(input, cov, interesting);
}

InputId Scheduler::next() {
  if (corpus_.empty()) throw EmptyCorpusError("next: corpus is empty");
  std::uint64_t ops = 0;
  const InputId id = pick(ops);
  last_select_ops_ = ops;
  corpus_.get(id).times_fuzzed += 1;
  return id;
}

void Scheduler::save(SnapshotWriter& out) const {
  out.put("scheduler", name());
  out.put_u64("k", k_size_);
  out.put("rng", rng_.state());
  out.put_u64s("global.total_hits", global_.total_hits);
  out.put_u64s("global.seen_buckets",
               std::vector<std::uint64_t>(global_.seen_buckets.begin(), global_.seen_buckets.end()));
  out.put_u64("corpus.size", corpus_.size());
  for (const auto& r : corpus_.records()) save_input(out, r);
  out.put_u64("ops.select", last_select_ops_);
  out.put_u64("ops.update", last_update_ops_);
  save_state(out);
}

void Scheduler::load(SnapshotReader& in) {
  const std::string stored = in.get("scheduler");
  if (stored != name()) {
    throw SnapshotError("snapshot holds scheduler '" + stored + "', not '" + std::string(name()) + "'");
  }
  if (in.get_u64("k") != k_size_) throw SnapshotError("snapshot: K mismatch");
  rng_.restore(in.get("rng"));
  global_.total_hits = in.get_u64s("global.total_hits");
  const auto buckets = in.get_u64s("global.seen_buckets");
  global_.seen_buckets.assign(buckets.begin(), buckets.end());
  if (global_.total_hits.size() != k_size_ || global_.seen_buckets.size() != k_size_) {
    throw SnapshotError("snapshot: global coverage has wrong length");
  }
  corpus_ = Corpus();
  const auto n = in.get_u64("corpus.size");
  for (std::uint64_t i = 0; i < n; ++i) corpus_.retain(load_input(in));
  last_select_ops_ = in.get_u64("ops.select");
  last_update_ops_ = in.get_u64("ops.update");
  load_state(in);
}

FeatureScheduler::FeatureScheduler(std::size_t k_size, std::uint64_t seed)
    : Scheduler(k_size, seed), posterior_(init_posterior(k_size)), favored_(k_size) {}

void FeatureScheduler::on_admit(const InputRecord& input) { favored_.update(input); }

std::uint64_t FeatureScheduler::on_observe(const InputRecord& input, const CoverageMap& cov,
                                           bool interesting) {
  const auto touched = update_posterior(posterior_, compute_reward(cov, interesting));
  if (interesting) favored_.update(input);
  return touched;
}

void FeatureScheduler::save_state(SnapshotWriter& out) const {
  out.put_reals("posterior.alpha", posterior_.alpha);
  out.put_reals("posterior.beta", posterior_.beta);
  std::vector<std::uint64_t> ids;
  std::vector<double> weights;
  std::vector<std::uint64_t> present;
  for (const auto& e : favored_.raw()) {
    present.push_back(e.has_value());
    ids.push_back(e ? e->id : 0);
    weights.push_back(e ? e->weight : 0.0);
  }
  out.put_u64s("favored.present", present);
  out.put_u64s("favored.id", ids);
  out.put_reals("favored.weight", weights);
}

void FeatureScheduler::load_state(SnapshotReader& in) {
  posterior_.alpha = in.get_reals("posterior.alpha");
  posterior_.beta = in.get_reals("posterior.beta");
  const auto present = in.get_u64s("favored.present");
  const auto ids = in.get_u64s("favored.id");
  const auto weights = in.get_reals("favored.weight");
  const std::size_t k = k_size();
  if (posterior_.alpha.size() != k || posterior_.beta.size() != k || present.size() != k ||
      ids.size() != k || weights.size() != k) {
    throw SnapshotError("snapshot: posterior or favored table has wrong length");
  }
  auto& entries = favored_.raw();
  for (std::size_t i = 0; i < k; ++i) {
    entries[i].reset();
    if (present[i]) entries[i] = FavoredEntry{ids[i], weights[i]};
  }
}

TScheduler::TScheduler(Variant variant, std::size_t k_size, std::uint64_t seed)
    : FeatureScheduler(k_size, seed), variant_(variant) {}

InputId TScheduler::pick(std::uint64_t& ops) {
  RngVariateSource rng_source(rng());
  VariateSource& source = override_ ? *override_ : rng_source;
  const auto action = select_action(posterior_, variant_, favored_.selectable(), source, &ops);
  return favored_.at(action)->id;
}

InputId GreedyScheduler::pick(std::uint64_t& ops) {
  std::vector<double> means(k_size());
  for (std::size_t k = 0; k < means.size(); ++k) {
    means[k] = posterior_.alpha[k] / (posterior_.alpha[k] + posterior_.beta[k]);
  }
  ops = means.size();
  return favored_.at(masked_argmax(means, favored_.selectable()))->id;
}

InputId UniformScheduler::pick(std::uint64_t& ops) {
  ops = 1;
  return corpus().at_position(rng().below(corpus().size())).id;
}

InputId RoundRobinScheduler::pick(std::uint64_t& ops) {
  ops = 1;
  const InputId id = corpus().at_position(cursor_ % corpus().size()).id;
  ++cursor_;
  return id;
}

void RoundRobinScheduler::save_state(SnapshotWriter& out) const { out.put_u64("cursor", cursor_); }

void RoundRobinScheduler::load_state(SnapshotReader& in) { cursor_ = in.get_u64("cursor"); }

const std::vector<std::string>& scheduler_names() {
  static const std::vector<std::string> names = {"rare-minus", "rare-plus", "sample",
                                                 "greedy",     "uniform",   "round-robin"};
  return names;
}

bool is_scheduler_name(std::string_view name) {
  const auto& names = scheduler_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

std::unique_ptr<Scheduler> make_scheduler(std::string_view name, std::size_t k_size,
                                          std::uint64_t seed) {
  if (const auto variant = parse_variant(name)) {
    return std::make_unique<TScheduler>(*variant, k_size, seed);
  }
  if (name == "greedy") return std::make_unique<GreedyScheduler>(k_size, seed);
  if (name == "uniform") return std::make_unique<UniformScheduler>(k_size, seed);
  if (name == "round-robin") return std::make_unique<RoundRobinScheduler>(k_size, seed);
  throw ConfigError("unknown scheduler '" + std::string(name) + "'");
}

}  // namespace tsched
