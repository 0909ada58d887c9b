#include <doctest.h>

#include <algorithm>
#include <random>
#include <regex>

#include <json.hpp>

#include "microdep/emit.hpp"
#include "oracles.hpp"
#include "temp_dir.hpp"

using namespace microdep;
using namespace microdep::testing;

namespace {

DependencyGraph tap_and_eat() {
  std::vector<std::string> nodes = {"stores", "configserver", "accounts", "customers", "prices"};
  std::vector<DependencyEdge> c, a;
  for (auto s : {"stores", "accounts", "customers", "prices"}) {
    c.push_back({s, "configserver", EdgeKind::config, false});
    a.push_back({s, "configserver", EdgeKind::api, false});
  }
  return build_graph("tap-and-eat", nodes, c, a);
}

std::size_t count_of(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1))
    ++n;
  return n;
}

std::string random_name(std::mt19937& rng) {
  static const std::vector<std::string> pieces = {"a",  "svc", "-",  "_", "&", "<",  ">",
                                                  "\"", "'",   " ",  "x", "9", "é", "db"};
  std::uniform_int_distribution<std::size_t> len(1, 5);
  std::string out;
  for (std::size_t n = len(rng); n > 0; --n)
    out += pieces[rng() % pieces.size()];
  return out;
}

DependencyGraph random_dag(std::mt19937& rng) {
  std::uniform_int_distribution<std::size_t> n_dist(1, 12);
  std::size_t n = n_dist(rng);
  std::vector<std::string> nodes;
  while (nodes.size() < n) {
    auto name = random_name(rng) + std::to_string(nodes.size());
    nodes.push_back(name);
  }
  // Edges only run forward in a random topological order.
  std::vector<std::size_t> topo(n);
  for (std::size_t i = 0; i < n; ++i)
    topo[i] = i;
  std::shuffle(topo.begin(), topo.end(), rng);
  std::vector<DependencyEdge> edges;
  std::bernoulli_distribution keep(0.3);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (keep(rng))
        edges.push_back({nodes[topo[i]], nodes[topo[j]], EdgeKind::config, false});
  return build_graph("random", nodes, edges, {});
}

// Longest outgoing chain by repeated relaxation; only valid on DAGs.
std::vector<std::size_t> oracle_layers(const DependencyGraph& g) {
  std::vector<std::size_t> layer(g.nodes.size(), 0);
  for (std::size_t round = 0; round < g.nodes.size(); ++round)
    for (const auto& e : g.edges) {
      auto s = g.index_of(e.source), t = g.index_of(e.target);
      layer[s] = std::max(layer[s], layer[t] + 1);
    }
  return layer;
}

} // namespace

TEST_CASE("to_graphml: golden reference document") {
  auto expected = slurp(golden("tap-and-eat.graphml"));
  REQUIRE_FALSE(expected.empty());
  CHECK(to_graphml(tap_and_eat()) == expected);
}

TEST_CASE("to_graphml: single node") {
  auto xml = to_graphml(build_graph("p", {"a"}, {}, {}));
  CHECK(xml.find("<graph id=\"G\" edgedefault=\"directed\">\n      <node id=\"a\" />\n   "
                 "</graph>") != std::string::npos);
  CHECK(count_of(xml, "<node ") == 1);
  CHECK(count_of(xml, "<edge ") == 0);
  CHECK(xml.back() == '\n');
  CHECK(xml.find('\r') == std::string::npos);
}

TEST_CASE("to_graphml: edge id escapes the arrow") {
  std::vector<DependencyEdge> e = {{"x", "y", EdgeKind::api, false}};
  auto xml = to_graphml(build_graph("p", {"x", "y"}, {}, e));
  CHECK(xml.find("<edge id=\"x-&gt;y\" source=\"x\" target=\"y\" label=\"depends\">") !=
        std::string::npos);
  CHECK(xml.find("<data key=\"edgelabel\">depends</data>") != std::string::npos);
}

TEST_CASE("to_graphml: escaping and invalid names") {
  auto xml = to_graphml(build_graph("p", {"a&b", "<c>", "q\"'"}, {}, {}));
  CHECK(xml.find("<node id=\"a&amp;b\" />") != std::string::npos);
  CHECK(xml.find("<node id=\"&lt;c&gt;\" />") != std::string::npos);
  CHECK(xml.find("<node id=\"q&quot;&apos;\" />") != std::string::npos);
  CHECK(xml_well_formed(xml));

  CHECK_THROWS_AS(to_graphml(build_graph("p", {"bad\x01name"}, {}, {})), InvalidName);
  CHECK_THROWS_AS(to_graphml(build_graph("p", {"tab\tname"}, {}, {})), InvalidName);
}

TEST_CASE("to_graphml: indentation option") {
  auto two = to_graphml(build_graph("p", {"a"}, {}, {}), "  ");
  CHECK(two.find("\n    <node id=\"a\" />\n") != std::string::npos);
  CHECK_THROWS_AS(to_graphml(build_graph("p", {"a"}, {}, {}), "\t"), Error);
}

TEST_CASE("to_graphml round-trips 200 random DAGs") {
  std::mt19937 rng(99);
  for (int i = 0; i < 200; ++i) {
    auto g = random_dag(rng);
    auto xml = to_graphml(g);
    std::string why;
    CHECK_MESSAGE(xml_well_formed(xml, &why), why);
    auto back = read_graphml(xml);
    CHECK(back.nodes == g.nodes);
    REQUIRE(back.edges.size() == g.edges.size());
    for (std::size_t k = 0; k < g.edges.size(); ++k) {
      CHECK(back.edges[k].first == g.edges[k].source);
      CHECK(back.edges[k].second == g.edges[k].target);
      CHECK(back.labels[k] == "depends");
    }
    auto rebuilt = std::vector<DependencyEdge>{};
    for (const auto& [s, t] : back.edges)
      rebuilt.push_back({s, t, EdgeKind::config, false});
    CHECK(build_graph("random", back.nodes, rebuilt, {}) == g);
    CHECK(to_graphml(g) == xml);
  }
}

TEST_CASE("to_dot") {
  SUBCASE("single node") {
    auto dot = to_dot(build_graph("p", {"a"}, {}, {}));
    CHECK(dot == "digraph \"p\" {\n  \"a\";\n}\n");
  }
  SUBCASE("reference layout") {
    auto dot = to_dot(tap_and_eat());
    CHECK(count_of(dot, " -> ") == 4);
    CHECK(count_of(dot, "[label=\"depends\"];") == 4);
    CHECK(dot.find("  \"stores\" -> \"configserver\" [label=\"depends\"];\n") !=
          std::string::npos);
    std::regex node_stmt(R"(^  "[^"]*";$)");
    std::size_t nodes = 0;
    std::istringstream in(dot);
    for (std::string line; std::getline(in, line);)
      nodes += std::regex_match(line, node_stmt);
    CHECK(nodes == 5);
  }
  SUBCASE("quotes and backslashes") {
    auto dot = to_dot(build_graph("p\"q", {"say \"hi\"", "back\\"}, {}, {}));
    CHECK(dot.find("digraph \"p\\\"q\"") != std::string::npos);
    CHECK(dot.find("  \"say \\\"hi\\\"\";\n") != std::string::npos);
    CHECK(dot.find("  \"back\\\\\";\n") != std::string::npos);
  }
}

TEST_CASE("to_svg") {
  SUBCASE("single node") {
    auto svg = to_svg(build_graph("p", {"a"}, {}, {}));
    CHECK(count_of(svg, "<rect ") == 1);
    CHECK(count_of(svg, "<line ") == 0);
    CHECK(xml_well_formed(svg));
  }
  SUBCASE("reference layout converges on configserver") {
    auto g = tap_and_eat();
    auto svg = to_svg(g);
    CHECK(count_of(svg, "<rect ") == 5);
    CHECK(count_of(svg, "marker-end=\"url(#arrow)\"") == 4);
    CHECK(xml_well_formed(svg));

    // Every arrow ends on the left edge of configserver's rectangle.
    std::regex rect(R"re(<rect x="(\d+)" y="(\d+)" width="(\d+)" height="(\d+)")re");
    std::vector<std::array<int, 4>> rects;
    for (auto it = std::sregex_iterator(svg.begin(), svg.end(), rect); it != std::sregex_iterator();
         ++it)
      rects.push_back({std::stoi((*it)[1]), std::stoi((*it)[2]), std::stoi((*it)[3]),
                       std::stoi((*it)[4])});
    auto cs = rects[g.index_of("configserver")];
    std::regex line(R"re(<line x1="(\d+)" y1="(\d+)" x2="(\d+)" y2="(\d+)")re");
    int arrows = 0;
    for (auto it = std::sregex_iterator(svg.begin(), svg.end(), line);
         it != std::sregex_iterator(); ++it) {
      int x2 = std::stoi((*it)[3]), y2 = std::stoi((*it)[4]);
      CHECK(x2 == cs[0]);
      CHECK(y2 >= cs[1]);
      CHECK(y2 <= cs[1] + cs[3]);
      ++arrows;
    }
    CHECK(arrows == 4);
    CHECK(layout_layers(g) == std::vector<std::size_t>{1, 0, 1, 1, 1});
  }
  SUBCASE("chain a -> b") {
    std::vector<DependencyEdge> e = {{"a", "b", EdgeKind::config, false}};
    CHECK(layout_layers(build_graph("p", {"a", "b"}, e, {})) ==
          std::vector<std::size_t>{1, 0});
  }
  SUBCASE("cycles are broken in canonical order") {
    std::vector<DependencyEdge> e = {{"a", "b", EdgeKind::config, false},
                                     {"b", "c", EdgeKind::config, false},
                                     {"c", "a", EdgeKind::config, false}};
    auto g = build_graph("p", {"a", "b", "c"}, e, {});
    CHECK(layout_layers(g) == std::vector<std::size_t>{2, 1, 0});
    CHECK(count_of(to_svg(g), "<line ") == 3);
  }
  SUBCASE("layers match an independent longest-path computation") {
    std::mt19937 rng(3);
    for (int i = 0; i < 100; ++i) {
      auto g = random_dag(rng);
      CHECK(layout_layers(g) == oracle_layers(g));
      auto svg = to_svg(g);
      CHECK(xml_well_formed(svg));
      CHECK(svg == to_svg(g));
    }
  }
}

TEST_CASE("to_cypher") {
  SUBCASE("single node") {
    CHECK(to_cypher(build_graph("p", {"a"}, {}, {})) == "MERGE (:Service {name: 'a'});\n");
  }
  SUBCASE("reference layout") {
    auto text = to_cypher(tap_and_eat());
    CHECK(count_of(text, "MERGE (:Service") == 5);
    CHECK(count_of(text, "[:DEPENDS_ON]") == 4);
    // Node statements come before relationship statements.
    CHECK(text.rfind("MERGE (:Service") < text.find("MATCH "));
  }
  SUBCASE("apostrophes and backslashes re-parse to the original names") {
    std::vector<std::string> names = {"o'brien", "back\\slash", "new\nline"};
    std::vector<DependencyEdge> e = {{"o'brien", "back\\slash", EdgeKind::api, false}};
    auto text = to_cypher(build_graph("p", names, {}, e));
    auto lits = cypher_literals(text);
    CHECK(lits == std::vector<std::string>{"o'brien", "back\\slash", "new\nline", "o'brien",
                                           "back\\slash"});
    CHECK(count_of(text, "\n") == 4);
  }
}

TEST_CASE("to_json_summary") {
  SUBCASE("reference layout") {
    SlocReport sloc;
    sloc.total = 1418;
    auto text = to_json_summary(tap_and_eat(), sloc, {"w1"});
    auto doc = nlohmann::ordered_json::parse(text);
    std::vector<std::string> keys;
    for (auto& [k, v] : doc.items())
      keys.push_back(k);
    CHECK(keys == std::vector<std::string>{"project", "services", "service_count",
                                           "dependency_count", "edges", "kloc", "warnings"});
    CHECK(doc["service_count"] == 5);
    CHECK(doc["dependency_count"] == 4);
    CHECK(doc["edges"][0]["kind"] == "both");
    CHECK(doc["warnings"][0] == "w1");
    CHECK(text.find("\"kloc\": 1.418,") != std::string::npos);
    CHECK(text.back() == '\n');
  }
  SUBCASE("single node, zero sloc") {
    auto text = to_json_summary(build_graph("p", {"a"}, {}, {}), SlocReport{});
    auto doc = nlohmann::json::parse(text);
    CHECK(doc["service_count"] == 1);
    CHECK(doc["dependency_count"] == 0);
    CHECK(text.find("\"kloc\": 0.000,") != std::string::npos);
    CHECK(doc["edges"].empty());
  }
}

TEST_CASE("every format agrees with the metrics and is deterministic") {
  std::mt19937 rng(17);
  for (int i = 0; i < 50; ++i) {
    auto g = random_dag(rng);
    auto m = graph_metrics(g);
    CHECK(read_graphml(to_graphml(g)).nodes.size() == m.service_count);
    CHECK(read_graphml(to_graphml(g)).edges.size() == m.dependency_count);
    CHECK(count_of(to_svg(g), "<rect ") == m.service_count);
    CHECK(count_of(to_svg(g), "<line ") == m.dependency_count);
    CHECK(count_of(to_cypher(g), "MERGE (:Service") == m.service_count);
    CHECK(count_of(to_cypher(g), "MATCH ") == m.dependency_count);
    auto doc = nlohmann::json::parse(to_json_summary(g, {}));
    CHECK(doc["services"].size() == m.service_count);
    CHECK(doc["edges"].size() == m.dependency_count);
    for (auto f : kAllFormats)
      CHECK(render(g, f) == render(g, f));
  }
}

TEST_CASE("format names") {
  for (auto f : kAllFormats) {
    CHECK(format_from_string(to_string(f)) == f);
    CHECK(file_extension(f).front() == '.');
  }
  CHECK_FALSE(format_from_string("png"));
  CHECK(file_extension(Format::graphml) == ".graphml");
}
