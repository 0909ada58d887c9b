#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "microdep/depgraph.hpp"
#include "microdep/error.hpp"
#include "microdep/sloc.hpp"

namespace microdep {

namespace fs = std::filesystem;

enum class Format { graphml, dot, svg, cypher, json };

std::string_view to_string(Format format);
std::optional<Format> format_from_string(std::string_view text);
/// File extension (with dot) used when writing `format` to a directory.
std::string_view file_extension(Format format);
inline constexpr Format kAllFormats[] = {Format::graphml, Format::dot, Format::svg,
                                         Format::cypher, Format::json};

struct EmitOptions {
  Format format = Format::graphml;
  /// Empty means standard output.
  fs::path output_path;
  /// Per-level GraphML indentation; spaces only.
  std::string indent = "   ";
};

/// GraphML in the fixed layout of the reference dataset: one `edgelabel`
/// key, a directed graph "G", self-closed nodes and one labeled edge per
/// dependency. Throws InvalidName for names holding control characters.
std::string to_graphml(const DependencyGraph& graph, std::string_view indent = "   ");

std::string to_dot(const DependencyGraph& graph);

/// Deterministic layered drawing. A node's layer is the length of the
/// longest dependency chain leaving it; sinks sit in layer 0, drawn
/// rightmost.
std::string to_svg(const DependencyGraph& graph);

/// Graph-database import script: MERGE statements for `Service` nodes and
/// `DEPENDS_ON` relationships.
std::string to_cypher(const DependencyGraph& graph);

std::string to_json_summary(const DependencyGraph& graph, const SlocReport& sloc,
                            const Warnings& warnings = {});

/// Renders `graph` in `options.format` (json uses `sloc` and `warnings`).
std::string render(const DependencyGraph& graph, Format format,
                   const SlocReport& sloc = {}, const Warnings& warnings = {},
                   std::string_view indent = "   ");

/// Layer assigned to each node by the SVG layout, in node order.
std::vector<std::size_t> layout_layers(const DependencyGraph& graph);

} // namespace microdep
