#include "tsched/coverage.hpp"

#include <string>
#include <utility>

#include "tsched/errors.hpp"

namespace tsched {

namespace {

void check_dims(std::size_t expected, std::size_t got, const char* what) {
  if (expected != got) {
    throw DimensionError(std::string(what) + ": coverage map has " + std::to_string(got) +
                         " entries, expected " + std::to_string(expected));
  }
}

}  // namespace

CoverageMap CoverageMap::from_features(std::size_t k_size,
                                       std::span<const std::uint32_t> features) {
  CoverageMap map(k_size);
  for (const auto k : features) {
    if (k >= k_size) throw DimensionError("CoverageMap: feature index out of range");
    map.hits[k] = 1;
  }
  return map;
}

std::vector<std::uint32_t> CoverageMap::features() const {
  std::vector<std::uint32_t> out;
  for (std::size_t k = 0; k < hits.size(); ++k) {
    if (hits[k] != 0) out.push_back(static_cast<std::uint32_t>(k));
  }
  return out;
}

std::optional<Interestingness> parse_interestingness(std::string_view name) {
  if (name == "new-feature") return Interestingness::kNewFeature;
  if (name == "new-bucket") return Interestingness::kNewBucket;
  return std::nullopt;
}

std::string_view to_string(Interestingness policy) {
  return policy == Interestingness::kNewFeature ? "new-feature" : "new-bucket";
}

std::uint8_t bucketize(std::uint64_t hit_count) {
  if (hit_count == 0) throw Error("bucketize: hit count must be >= 1");
  if (hit_count <= 3) return static_cast<std::uint8_t>(hit_count - 1);
  if (hit_count <= 7) return 3;
  if (hit_count <= 15) return 4;
  if (hit_count <= 31) return 5;
  if (hit_count <= 127) return 6;
  return 7;
}

std::size_t GlobalCoverage::covered_count() const {
  std::size_t n = 0;
  for (const auto h : total_hits) n += h != 0;
  return n;
}

bool classify_interesting(const GlobalCoverage& global, const CoverageMap& cov,
                          Interestingness policy) {
  check_dims(global.size(), cov.size(), "classify_interesting");
  for (std::size_t k = 0; k < cov.size(); ++k) {
    if (cov.hits[k] == 0) continue;
    if (policy == Interestingness::kNewFeature) {
      if (global.total_hits[k] == 0) return true;
    } else {
      const auto bit = static_cast<std::uint8_t>(1u << bucketize(cov.hits[k]));
      if ((global.seen_buckets[k] & bit) == 0) return true;
    }
  }
  return false;
}

void absorb(GlobalCoverage& global, const CoverageMap& cov) {
  check_dims(global.size(), cov.size(), "absorb");
  for (std::size_t k = 0; k < cov.size(); ++k) {
    if (cov.hits[k] == 0) continue;
    global.total_hits[k] += cov.hits[k];
    global.seen_buckets[k] |= static_cast<std::uint8_t>(1u << bucketize(cov.hits[k]));
  }
}

std::vector<std::optional<double>> feature_rareness(const GlobalCoverage& global) {
  std::vector<std::optional<double>> out(global.size());
  for (std::size_t k = 0; k < global.size(); ++k) {
    if (global.total_hits[k] > 0) out[k] = 1.0 / static_cast<double>(global.total_hits[k]);
  }
  return out;
}

std::size_t FavoredTable::entry_count() const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.has_value();
  return n;
}

void FavoredTable::update(const InputRecord& input) {
  const double w = input.weight();
  for (const auto k : input.features) {
    if (k >= entries_.size()) throw DimensionError("FavoredTable: feature index out of range");
    auto& entry = entries_[k];
    if (!entry || w < entry->weight) entry = FavoredEntry{input.id, w};
  }
}

std::vector<bool> FavoredTable::selectable() const {
  std::vector<bool> mask(entries_.size());
  for (std::size_t k = 0; k < entries_.size(); ++k) mask[k] = entries_[k].has_value();
  return mask;
}

bool Corpus::retain(const InputRecord& input) {
  if (contains(input.id)) return false;
  index_.emplace(input.id, records_.size());
  records_.push_back(input);
  return true;
}

const InputRecord& Corpus::get(InputId id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) throw Error("Corpus: unknown input id " + std::to_string(id));
  return records_[it->second];
}

InputRecord& Corpus::get(InputId id) {
  return const_cast<InputRecord&>(std::as_const(*this).get(id));
}

}  // namespace tsched
