#include "tsched/target.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <string>

#include "tsched/errors.hpp"

namespace tsched {

namespace {

using nlohmann::json;

const std::set<std::string> kEdgeKeys = {"id", "prereqs", "p", "time_range", "size_range"};

}  // namespace

CfgTarget::CfgTarget(std::vector<Edge> edges) : edges_(std::move(edges)) {
  if (edges_.empty()) throw TargetError("target has no edges");
  std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) { return a.id < b.id; });
  const std::size_t n = edges_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Edge& e = edges_[i];
    if (e.id != i) {
      throw TargetError("edge ids must be exactly 0.." + std::to_string(n - 1) +
                        " (duplicate or missing id near " + std::to_string(e.id) + ")");
    }
    if (!(e.p >= 0.0 && e.p <= 1.0)) {
      throw TargetError("edge " + std::to_string(e.id) + ": p must lie in [0, 1]");
    }
    if (!(e.time_range.first >= 0.0 && e.time_range.first <= e.time_range.second)) {
      throw TargetError("edge " + std::to_string(e.id) + ": bad time_range");
    }
    if (e.size_range.first > e.size_range.second) {
      throw TargetError("edge " + std::to_string(e.id) + ": bad size_range");
    }
    for (const auto pre : e.prereqs) {
      if (pre >= n) {
        throw TargetError("edge " + std::to_string(e.id) + " depends on unknown edge " +
                          std::to_string(pre) + " (unreachable)");
      }
      if (pre == e.id) throw TargetError("edge " + std::to_string(e.id) + " depends on itself");
    }
    if (e.prereqs.empty()) roots_.push_back(e.id);
  }
  if (roots_.empty()) throw TargetError("target has no root edge");

  // Kahn's algorithm: every edge must be peeled off, otherwise there is a cycle.
  std::vector<std::size_t> pending(n);
  std::vector<std::vector<std::uint32_t>> dependents(n);
  for (const auto& e : edges_) {
    std::set<std::uint32_t> unique(e.prereqs.begin(), e.prereqs.end());
    pending[e.id] = unique.size();
    for (const auto pre : unique) dependents[pre].push_back(e.id);
  }
  std::vector<std::uint32_t> ready(roots_.begin(), roots_.end());
  std::size_t visited = 0;
  while (!ready.empty()) {
    const auto id = ready.back();
    ready.pop_back();
    ++visited;
    for (const auto d : dependents[id]) {
      if (--pending[d] == 0) ready.push_back(d);
    }
  }
  if (visited != n) throw TargetError("prerequisite graph contains a cycle");
}

CfgTarget CfgTarget::from_json(const json& doc) {
  if (!doc.is_array()) throw TargetError("target file must be a JSON array of edges");
  std::vector<Edge> edges;
  try {
    for (const auto& item : doc) {
      if (!item.is_object()) throw TargetError("edge entries must be objects");
      for (const auto& [key, value] : item.items()) {
        if (!kEdgeKeys.contains(key)) throw TargetError("unknown edge key '" + key + "'");
      }
      Edge e;
      e.id = item.at("id").get<std::uint32_t>();
      e.prereqs = item.value("prereqs", std::vector<std::uint32_t>{});
      e.p = item.at("p").get<double>();
      if (item.contains("time_range")) {
        const auto r = item.at("time_range").get<std::vector<double>>();
        if (r.size() != 2) throw TargetError("time_range must have two entries");
        e.time_range = {r[0], r[1]};
      }
      if (item.contains("size_range")) {
        const auto r = item.at("size_range").get<std::vector<std::uint64_t>>();
        if (r.size() != 2) throw TargetError("size_range must have two entries");
        e.size_range = {r[0], r[1]};
      }
      edges.push_back(std::move(e));
    }
  } catch (const json::exception& ex) {
    throw TargetError(std::string("malformed target: ") + ex.what());
  }
  return CfgTarget(std::move(edges));
}

CfgTarget CfgTarget::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw TargetError("cannot open target file " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& ex) {
    throw TargetError("target file " + path.string() + ": " + ex.what());
  }
  return from_json(doc);
}

json CfgTarget::to_json() const {
  json doc = json::array();
  for (const auto& e : edges_) {
    doc.push_back({{"id", e.id},
                   {"prereqs", e.prereqs},
                   {"p", e.p},
                   {"time_range", {e.time_range.first, e.time_range.second}},
                   {"size_range", {e.size_range.first, e.size_range.second}}});
  }
  return doc;
}

CfgTarget make_chain_target(std::size_t n, double p) {
  std::vector<Edge> edges(n);
  for (std::size_t i = 0; i < n; ++i) {
    edges[i].id = static_cast<std::uint32_t>(i);
    edges[i].p = i == 0 ? 1.0 : p;
    if (i > 0) edges[i].prereqs = {static_cast<std::uint32_t>(i - 1)};
  }
  return CfgTarget(std::move(edges));
}

CfgTarget make_motivating_target(double p) {
  std::vector<Edge> edges(4);
  for (std::uint32_t i = 0; i < 4; ++i) {
    edges[i].id = i;
    edges[i].p = p;
  }
  edges[1].prereqs = {0};
  edges[2].prereqs = {1};
  return CfgTarget(std::move(edges));
}

}  // namespace tsched
