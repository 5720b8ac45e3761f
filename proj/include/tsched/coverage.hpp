#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tsched {

using InputId = std::uint64_t;

// Per-feature hit counts x_k recorded by one execution.
struct CoverageMap {
  std::vector<std::uint32_t> hits;

  CoverageMap() = default;
  explicit CoverageMap(std::size_t k_size) : hits(k_size, 0) {}
  explicit CoverageMap(std::vector<std::uint32_t> h) : hits(std::move(h)) {}

  std::size_t size() const { return hits.size(); }

  // Map with a single hit on each listed feature.
  static CoverageMap from_features(std::size_t k_size,
                                   std::span<const std::uint32_t> features);
  std::vector<std::uint32_t> features() const;

  friend bool operator==(const CoverageMap&, const CoverageMap&) = default;
};

enum class Interestingness { kNewFeature, kNewBucket };

std::optional<Interestingness> parse_interestingness(std::string_view name);
std::string_view to_string(Interestingness policy);

// AFL hit-count classes: {1}, {2}, {3}, {4-7}, {8-15}, {16-31}, {32-127}, {128+}.
// Returns the class index 0..7. hit_count must be >= 1.
std::uint8_t bucketize(std::uint64_t hit_count);

struct GlobalCoverage {
  std::vector<std::uint64_t> total_hits;
  // Bit b of seen_buckets[k] is set once bucket class b was observed on k.
  std::vector<std::uint8_t> seen_buckets;

  GlobalCoverage() = default;
  explicit GlobalCoverage(std::size_t k_size)
      : total_hits(k_size, 0), seen_buckets(k_size, 0) {}

  std::size_t size() const { return total_hits.size(); }
  std::size_t covered_count() const;

  friend bool operator==(const GlobalCoverage&, const GlobalCoverage&) = default;
};

// Pure novelty test; does not modify `global`.
bool classify_interesting(const GlobalCoverage& global, const CoverageMap& cov,
                          Interestingness policy);

void absorb(GlobalCoverage& global, const CoverageMap& cov);

// 1 / total_hits[k]; nullopt for features never hit. Reporting only.
std::vector<std::optional<double>> feature_rareness(const GlobalCoverage& global);

struct InputRecord {
  InputId id = 0;
  std::uint64_t size = 0;
  double exec_time = 0.0;
  std::vector<std::uint32_t> features;  // sorted, x_k != 0
  std::uint64_t times_fuzzed = 0;

  double weight() const { return exec_time * static_cast<double>(size); }

  friend bool operator==(const InputRecord&, const InputRecord&) = default;
};

struct FavoredEntry {
  InputId id = 0;
  double weight = 0.0;

  friend bool operator==(const FavoredEntry&, const FavoredEntry&) = default;
};

// Feature -> lightest retained input covering it (exec_time x size).
class FavoredTable {
 public:
  FavoredTable() = default;
  explicit FavoredTable(std::size_t k_size) : entries_(k_size) {}

  std::size_t size() const { return entries_.size(); }
  const std::optional<FavoredEntry>& at(std::size_t k) const { return entries_.at(k); }
  std::size_t entry_count() const;

  // Strictly lighter inputs replace the entry; the incumbent wins ties.
  void update(const InputRecord& input);

  // mask[k] is true iff feature k has a favored input.
  std::vector<bool> selectable() const;

  std::vector<std::optional<FavoredEntry>>& raw() { return entries_; }
  const std::vector<std::optional<FavoredEntry>>& raw() const { return entries_; }

  friend bool operator==(const FavoredTable&, const FavoredTable&) = default;

 private:
  std::vector<std::optional<FavoredEntry>> entries_;
};

// Retained inputs in insertion order.
class Corpus {
 public:
  // Returns false (and leaves the corpus unchanged) if the id is already present.
  bool retain(const InputRecord& input);

  bool contains(InputId id) const { return index_.contains(id); }
  const InputRecord& get(InputId id) const;
  InputRecord& get(InputId id);

  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const InputRecord& at_position(std::size_t i) const { return records_.at(i); }
  const std::vector<InputRecord>& records() const { return records_; }

  friend bool operator==(const Corpus& a, const Corpus& b) { return a.records_ == b.records_; }

 private:
  std::vector<InputRecord> records_;
  std::unordered_map<InputId, std::size_t> index_;
};

}  // namespace tsched
