#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace microdep {

struct ComposeModel;

/// Where the evidence for an edge came from.
enum class EdgeKind { config, api, both };

std::string_view to_string(EdgeKind kind);
EdgeKind edge_kind_from_string(std::string_view text);

inline constexpr std::string_view kDependsLabel = "depends";

/// Directed "depends" relation: `source` needs `target`.
struct DependencyEdge {
  std::string source;
  std::string target;
  EdgeKind kind = EdgeKind::config;
  /// For api evidence: whether some call path matched an endpoint of the
  /// target. Informational only.
  bool endpoint_matched = false;

  std::string_view label() const { return kDependsLabel; }

  bool operator==(const DependencyEdge&) const = default;
};

struct DependencyGraph {
  std::string project_name;
  std::vector<std::string> nodes;
  std::vector<DependencyEdge> edges;

  /// Position of `name` in `nodes`, or nodes.size() when absent.
  std::size_t index_of(std::string_view name) const;

  bool operator==(const DependencyGraph&) const = default;
};

struct Degree {
  std::string service;
  std::size_t count = 0;

  bool operator==(const Degree&) const = default;
};

struct GraphMetrics {
  std::size_t service_count = 0;
  std::size_t dependency_count = 0;
  std::vector<std::string> isolated_services;
  Degree max_fan_in;
  Degree max_fan_out;

  bool operator==(const GraphMetrics&) const = default;
};

/// Merges config and api evidence over the services of `model`. Duplicate
/// (source, target) pairs collapse into one edge whose kind records every
/// source of evidence; self-loops are dropped. Edges come out ordered by the
/// declaration index of source, then target. Throws UnknownService when an
/// edge names a service the model does not declare.
DependencyGraph build_graph(std::string project_name, const ComposeModel& model,
                            std::span<const DependencyEdge> config_edges,
                            std::span<const DependencyEdge> api_edges);

/// Same merge over an explicit node list.
DependencyGraph build_graph(std::string project_name,
                            std::vector<std::string> nodes,
                            std::span<const DependencyEdge> config_edges,
                            std::span<const DependencyEdge> api_edges);

GraphMetrics graph_metrics(const DependencyGraph& graph);

} // namespace microdep
