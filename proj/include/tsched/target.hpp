#pragma once

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include <json.hpp>

namespace tsched {

// One CFG edge (= one coverage feature). It can only be discovered by mutating
// an input whose coverage already contains every prerequisite edge, and then
// only with probability `p`.
struct Edge {
  std::uint32_t id = 0;
  std::vector<std::uint32_t> prereqs;
  double p = 1.0;
  std::pair<double, double> time_range{1.0, 10.0};
  std::pair<std::uint64_t, std::uint64_t> size_range{10, 1000};

  friend bool operator==(const Edge&, const Edge&) = default;
};

class CfgTarget {
 public:
  // Validates: ids are exactly 0..n-1, prerequisites name existing edges, the
  // prerequisite graph is acyclic (hence every edge is reachable from a root),
  // probabilities lie in [0, 1] and ranges are ordered.
  explicit CfgTarget(std::vector<Edge> edges);

  std::size_t size() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(std::size_t id) const { return edges_.at(id); }
  const std::vector<std::uint32_t>& roots() const { return roots_; }

  // Target file: JSON array of {id, prereqs, p, time_range, size_range}.
  // time_range / size_range are optional and default to [1,10] / [10,1000].
  static CfgTarget from_json(const nlohmann::json& doc);
  static CfgTarget load(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  friend bool operator==(const CfgTarget& a, const CfgTarget& b) { return a.edges_ == b.edges_; }

 private:
  std::vector<Edge> edges_;
  std::vector<std::uint32_t> roots_;
};

// Linear chain 0 -> 1 -> ... -> n-1; edge 0 is the only root. Non-root edges
// unlock with probability p.
CfgTarget make_chain_target(std::size_t n, double p);

// The four-feature motivating program: features 0,1,2 = lines 3,4,5 form a
// chain, feature 3 = line 6 is a second root.
CfgTarget make_motivating_target(double p);

}  // namespace tsched
