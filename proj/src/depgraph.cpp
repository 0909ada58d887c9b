#include "microdep/depgraph.hpp"

#include <algorithm>
#include <map>
#include <utility>

#include "microdep/compose.hpp"
#include "microdep/error.hpp"

namespace microdep {

std::string_view to_string(EdgeKind kind) {
  switch (kind) {
  case EdgeKind::config:
    return "config";
  case EdgeKind::api:
    return "api";
  case EdgeKind::both:
    return "both";
  }
  return "config";
}

EdgeKind edge_kind_from_string(std::string_view text) {
  if (text == "config")
    return EdgeKind::config;
  if (text == "api")
    return EdgeKind::api;
  if (text == "both")
    return EdgeKind::both;
  throw Error("unknown edge kind: " + std::string(text));
}

std::size_t DependencyGraph::index_of(std::string_view name) const {
  auto it = std::find(nodes.begin(), nodes.end(), name);
  return static_cast<std::size_t>(it - nodes.begin());
}

namespace {

constexpr unsigned kConfigBit = 1;
constexpr unsigned kApiBit = 2;

unsigned evidence_bits(EdgeKind kind) {
  switch (kind) {
  case EdgeKind::config:
    return kConfigBit;
  case EdgeKind::api:
    return kApiBit;
  case EdgeKind::both:
    return kConfigBit | kApiBit;
  }
  return 0;
}

EdgeKind kind_from_bits(unsigned bits) {
  if (bits == (kConfigBit | kApiBit))
    return EdgeKind::both;
  return bits == kApiBit ? EdgeKind::api : EdgeKind::config;
}

struct Evidence {
  unsigned bits = 0;
  bool matched = false;
};

} // namespace

DependencyGraph build_graph(std::string project_name,
                            std::vector<std::string> nodes,
                            std::span<const DependencyEdge> config_edges,
                            std::span<const DependencyEdge> api_edges) {
  std::map<std::string, std::size_t, std::less<>> index;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    index.emplace(nodes[i], i);

  auto lookup = [&](const std::string& name) {
    auto it = index.find(name);
    if (it == index.end())
      throw UnknownService("edge references unknown service '" + name + "'");
    return it->second;
  };

  std::map<std::pair<std::size_t, std::size_t>, Evidence> merged;
  auto absorb = [&](std::span<const DependencyEdge> edges) {
    for (const auto& e : edges) {
      auto s = lookup(e.source);
      auto t = lookup(e.target);
      if (s == t)
        continue;
      auto& ev = merged[{s, t}];
      ev.bits |= evidence_bits(e.kind);
      ev.matched = ev.matched || e.endpoint_matched;
    }
  };
  absorb(config_edges);
  absorb(api_edges);

  DependencyGraph graph;
  graph.project_name = std::move(project_name);
  graph.edges.reserve(merged.size());
  for (const auto& [key, ev] : merged)
    graph.edges.push_back({nodes[key.first], nodes[key.second],
                           kind_from_bits(ev.bits), ev.matched});
  graph.nodes = std::move(nodes);
  return graph;
}

DependencyGraph build_graph(std::string project_name, const ComposeModel& model,
                            std::span<const DependencyEdge> config_edges,
                            std::span<const DependencyEdge> api_edges) {
  return build_graph(std::move(project_name), model.service_names(),
                     config_edges, api_edges);
}

GraphMetrics graph_metrics(const DependencyGraph& graph) {
  GraphMetrics m;
  m.service_count = graph.nodes.size();
  m.dependency_count = graph.edges.size();

  std::vector<std::size_t> fan_in(graph.nodes.size(), 0);
  std::vector<std::size_t> fan_out(graph.nodes.size(), 0);
  for (const auto& e : graph.edges) {
    ++fan_out[graph.index_of(e.source)];
    ++fan_in[graph.index_of(e.target)];
  }

  for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
    if (fan_in[i] == 0 && fan_out[i] == 0)
      m.isolated_services.push_back(graph.nodes[i]);
    // Strict comparison keeps the earliest-declared service on ties.
    if (i == 0 || fan_in[i] > m.max_fan_in.count)
      m.max_fan_in = {graph.nodes[i], fan_in[i]};
    if (i == 0 || fan_out[i] > m.max_fan_out.count)
      m.max_fan_out = {graph.nodes[i], fan_out[i]};
  }
  return m;
}

} // namespace microdep
