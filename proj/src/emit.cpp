#include "microdep/emit.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include <json.hpp>

namespace microdep {

std::string_view to_string(Format format) {
  switch (format) {
  case Format::graphml: return "graphml";
  case Format::dot: return "dot";
  case Format::svg: return "svg";
  case Format::cypher: return "cypher";
  case Format::json: return "json";
  }
  return "graphml";
}

std::optional<Format> format_from_string(std::string_view text) {
  for (auto f : kAllFormats)
    if (to_string(f) == text)
      return f;
  return std::nullopt;
}

std::string_view file_extension(Format format) {
  switch (format) {
  case Format::graphml: return ".graphml";
  case Format::dot: return ".dot";
  case Format::svg: return ".svg";
  case Format::cypher: return ".cypher";
  case Format::json: return ".json";
  }
  return "";
}

namespace {

std::string xml_escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
    case '&': out += "&amp;"; break;
    case '<': out += "&lt;"; break;
    case '>': out += "&gt;"; break;
    case '"': out += "&quot;"; break;
    case '\'': out += "&apos;"; break;
    default: out.push_back(c);
    }
  }
  return out;
}

void check_xml_name(std::string_view name) {
  for (char c : name) {
    auto u = static_cast<unsigned char>(c);
    if (u < 0x20 || u == 0x7f)
      throw InvalidName("service name '" + std::string(name) +
                        "' contains a control character");
  }
}

std::string json_string(std::string_view s) {
  return nlohmann::json(std::string(s))
      .dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

} // namespace

std::string to_graphml(const DependencyGraph& graph, std::string_view indent) {
  if (indent.find_first_not_of(' ') != std::string_view::npos)
    throw Error("GraphML indent must consist of spaces");
  for (const auto& n : graph.nodes)
    check_xml_name(n);

  auto pad = [&](int depth) {
    std::string s;
    for (int i = 0; i < depth; ++i)
      s += indent;
    return s;
  };

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\" "
         "xmlns:xsi=\"http://www.w3.org/2001/XMLSchema-instance\" "
         "xsi:schemaLocation=\"http://graphml.graphdrawing.org/xmlns "
         "http://graphml.graphdrawing.org/xmlns/1.1/graphml.xsd\">\n"
      << pad(1)
      << "<key id=\"edgelabel\" for=\"edge\" attr.name=\"edgelabel\" attr.type=\"string\" />\n"
      << pad(1) << "<graph id=\"G\" edgedefault=\"directed\">\n";
  for (const auto& n : graph.nodes)
    out << pad(2) << "<node id=\"" << xml_escape(n) << "\" />\n";
  for (const auto& e : graph.edges) {
    out << pad(2) << "<edge id=\"" << xml_escape(e.source + "->" + e.target)
        << "\" source=\"" << xml_escape(e.source) << "\" target=\""
        << xml_escape(e.target) << "\" label=\"" << e.label() << "\">\n"
        << pad(3) << "<data key=\"edgelabel\">" << e.label() << "</data>\n"
        << pad(2) << "</edge>\n";
  }
  out << pad(1) << "</graph>\n"
      << "</graphml>\n";
  return out.str();
}

std::string to_dot(const DependencyGraph& graph) {
  auto quote = [](std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
      if (c == '"' || c == '\\')
        out.push_back('\\');
      if (c == '\n') {
        out += "\\n";
        continue;
      }
      out.push_back(c);
    }
    out.push_back('"');
    return out;
  };

  std::ostringstream out;
  out << "digraph " << quote(graph.project_name) << " {\n";
  for (const auto& n : graph.nodes)
    out << "  " << quote(n) << ";\n";
  for (const auto& e : graph.edges)
    out << "  " << quote(e.source) << " -> " << quote(e.target) << " [label=\""
        << e.label() << "\"];\n";
  out << "}\n";
  return out.str();
}

std::vector<std::size_t> layout_layers(const DependencyGraph& graph) {
  const auto n = graph.nodes.size();
  std::vector<std::vector<std::size_t>> succ(n);

  // Reachability in the acyclic subgraph accepted so far.
  auto reaches = [&](std::size_t from, std::size_t to) {
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> stack{from};
    while (!stack.empty()) {
      auto v = stack.back();
      stack.pop_back();
      if (v == to)
        return true;
      if (seen[v])
        continue;
      seen[v] = true;
      for (auto w : succ[v])
        stack.push_back(w);
    }
    return false;
  };

  for (const auto& e : graph.edges) {
    auto s = graph.index_of(e.source);
    auto t = graph.index_of(e.target);
    if (s >= n || t >= n || s == t)
      continue;
    // An edge closing a cycle is ignored for layout purposes.
    if (!reaches(t, s))
      succ[s].push_back(t);
  }

  std::vector<std::size_t> layer(n, 0);
  std::vector<bool> done(n, false);
  std::function<std::size_t(std::size_t)> depth = [&](std::size_t v) -> std::size_t {
    if (done[v])
      return layer[v];
    std::size_t best = 0;
    for (auto w : succ[v])
      best = std::max(best, depth(w) + 1);
    done[v] = true;
    return layer[v] = best;
  };
  for (std::size_t v = 0; v < n; ++v)
    depth(v);
  return layer;
}

std::string to_svg(const DependencyGraph& graph) {
  constexpr int kMargin = 20;
  constexpr int kNodeHeight = 36;
  constexpr int kRowGap = 24;
  constexpr int kColumnGap = 80;
  constexpr int kCharWidth = 8;

  auto layers = layout_layers(graph);
  std::size_t max_layer = 0;
  for (auto l : layers)
    max_layer = std::max(max_layer, l);

  int node_width = 96;
  for (const auto& name : graph.nodes)
    node_width = std::max(node_width, static_cast<int>(name.size()) * kCharWidth + 24);

  std::vector<int> x(graph.nodes.size());
  std::vector<int> y(graph.nodes.size());
  std::vector<int> rows(max_layer + 1, 0);
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
    auto col = static_cast<int>(max_layer - layers[i]);
    x[i] = kMargin + col * (node_width + kColumnGap);
    y[i] = kMargin + rows[layers[i]]++ * (kNodeHeight + kRowGap);
  }
  int max_rows = graph.nodes.empty() ? 0 : *std::max_element(rows.begin(), rows.end());
  int columns = static_cast<int>(max_layer) + 1;
  int width = 2 * kMargin + columns * node_width + (columns - 1) * kColumnGap;
  int height = 2 * kMargin + std::max(1, max_rows) * kNodeHeight +
               std::max(0, max_rows - 1) * kRowGap;

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' ' << height
      << "\">\n"
      << "  <title>" << xml_escape(graph.project_name) << "</title>\n"
      << "  <defs>\n"
      << "    <marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"10\" refY=\"5\" "
         "markerWidth=\"8\" markerHeight=\"8\" orient=\"auto\">\n"
      << "      <path d=\"M 0 0 L 10 5 L 0 10 z\" fill=\"#333333\" />\n"
      << "    </marker>\n"
      << "  </defs>\n"
      << "  <g class=\"edges\" stroke=\"#333333\" stroke-width=\"1.5\">\n";
  for (const auto& e : graph.edges) {
    auto s = graph.index_of(e.source);
    auto t = graph.index_of(e.target);
    int x1, y1, x2, y2;
    if (x[s] < x[t]) {
      x1 = x[s] + node_width, x2 = x[t];
      y1 = y[s] + kNodeHeight / 2, y2 = y[t] + kNodeHeight / 2;
    } else if (x[s] > x[t]) {
      x1 = x[s], x2 = x[t] + node_width;
      y1 = y[s] + kNodeHeight / 2, y2 = y[t] + kNodeHeight / 2;
    } else {
      x1 = x2 = x[s] + node_width / 2;
      bool down = y[s] < y[t];
      y1 = down ? y[s] + kNodeHeight : y[s];
      y2 = down ? y[t] : y[t] + kNodeHeight;
    }
    out << "    <line x1=\"" << x1 << "\" y1=\"" << y1 << "\" x2=\"" << x2 << "\" y2=\""
        << y2 << "\" marker-end=\"url(#arrow)\" />\n";
  }
  out << "  </g>\n"
      << "  <g class=\"nodes\" font-family=\"sans-serif\" font-size=\"14\">\n";
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
    auto name = xml_escape(graph.nodes[i]);
    out << "    <rect x=\"" << x[i] << "\" y=\"" << y[i] << "\" width=\"" << node_width
        << "\" height=\"" << kNodeHeight
        << "\" rx=\"6\" ry=\"6\" fill=\"#eef3fb\" stroke=\"#3b5b92\" />\n"
        << "    <text x=\"" << x[i] + node_width / 2 << "\" y=\""
        << y[i] + kNodeHeight / 2 + 5 << "\" text-anchor=\"middle\">" << name
        << "</text>\n";
  }
  out << "  </g>\n"
      << "</svg>\n";
  return out.str();
}

std::string to_cypher(const DependencyGraph& graph) {
  auto literal = [](std::string_view s) {
    std::string out = "'";
    for (char c : s) {
      switch (c) {
      case '\\': out += "\\\\"; break;
      case '\'': out += "\\'"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out.push_back(c);
      }
    }
    out.push_back('\'');
    return out;
  };

  std::ostringstream out;
  for (const auto& n : graph.nodes)
    out << "MERGE (:Service {name: " << literal(n) << "});\n";
  for (const auto& e : graph.edges)
    out << "MATCH (s:Service {name: " << literal(e.source) << "}), (t:Service {name: "
        << literal(e.target) << "}) MERGE (s)-[:DEPENDS_ON]->(t);\n";
  return out.str();
}

std::string to_json_summary(const DependencyGraph& graph, const SlocReport& sloc,
                            const Warnings& warnings) {
  std::ostringstream out;
  auto string_array = [&](const std::vector<std::string>& items) {
    if (items.empty()) {
      out << "[]";
      return;
    }
    out << "[\n";
    for (std::size_t i = 0; i < items.size(); ++i)
      out << "    " << json_string(items[i]) << (i + 1 < items.size() ? ",\n" : "\n");
    out << "  ]";
  };

  out << "{\n"
      << "  \"project\": " << json_string(graph.project_name) << ",\n"
      << "  \"services\": ";
  string_array(graph.nodes);
  out << ",\n"
      << "  \"service_count\": " << graph.nodes.size() << ",\n"
      << "  \"dependency_count\": " << graph.edges.size() << ",\n"
      << "  \"edges\": ";
  if (graph.edges.empty()) {
    out << "[]";
  } else {
    out << "[\n";
    for (std::size_t i = 0; i < graph.edges.size(); ++i) {
      const auto& e = graph.edges[i];
      out << "    {\"source\": " << json_string(e.source)
          << ", \"target\": " << json_string(e.target) << ", \"kind\": \""
          << to_string(e.kind) << "\"}" << (i + 1 < graph.edges.size() ? ",\n" : "\n");
    }
    out << "  ]";
  }
  out << ",\n"
      << "  \"kloc\": " << format_kloc(sloc.total) << ",\n"
      << "  \"warnings\": ";
  string_array(warnings);
  out << "\n}\n";
  return out.str();
}

std::string render(const DependencyGraph& graph, Format format, const SlocReport& sloc,
                   const Warnings& warnings, std::string_view indent) {
  switch (format) {
  case Format::graphml: return to_graphml(graph, indent);
  case Format::dot: return to_dot(graph);
  case Format::svg: return to_svg(graph);
  case Format::cypher: return to_cypher(graph);
  case Format::json: return to_json_summary(graph, sloc, warnings);
  }
  return {};
}

} // namespace microdep
