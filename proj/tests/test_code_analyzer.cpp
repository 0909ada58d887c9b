#include <doctest.h>

#include <random>

#include "microdep/code_analyzer.hpp"
#include "temp_dir.hpp"

using namespace microdep;
using microdep::testing::fixture;
using microdep::testing::TempDir;

namespace {

const std::vector<std::string> kServices = {"stores", "configserver", "accounts", "customers",
                                            "prices"};

std::vector<std::pair<HttpMethod, std::string>> routes(const std::vector<Endpoint>& eps) {
  std::vector<std::pair<HttpMethod, std::string>> out;
  for (const auto& e : eps)
    out.emplace_back(e.http_method, e.path);
  return out;
}

using Routes = std::vector<std::pair<HttpMethod, std::string>>;

} // namespace

TEST_CASE("normalize_path") {
  CHECK(normalize_path("") == "/");
  CHECK(normalize_path("/") == "/");
  CHECK(normalize_path("prices") == "/prices");
  CHECK(normalize_path("/prices/") == "/prices");
  CHECK(normalize_path("//a///b/") == "/a/b");
  CHECK(normalize_path("/a/./b") == "/a/b");
  CHECK(normalize_path("/prices/{itemId}") == "/prices/{*}");
  CHECK(normalize_path("/c/{id:[0-9]+}/x") == "/c/{*}/x");
  CHECK(normalize_path("/a?x=1#frag") == "/a");
  CHECK(normalize_path("/v{n}/x") == "/v{*}/x");
}

TEST_CASE("normalize_path is idempotent on random inputs") {
  std::mt19937 rng(11);
  const std::string alphabet = "/ab{}.:?#*-_0";
  std::uniform_int_distribution<std::size_t> len(0, 24);
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  for (int i = 0; i < 2000; ++i) {
    std::string p;
    for (std::size_t n = len(rng); n > 0; --n)
      p.push_back(alphabet[pick(rng)]);
    auto once = normalize_path(p);
    CHECK(normalize_path(once) == once);
    CHECK(once.front() == '/');
    CHECK(once.find("//") == std::string::npos);
    if (once.size() > 1)
      CHECK(once.back() != '/');
  }
}

TEST_CASE("paths_overlap") {
  CHECK(paths_overlap("/prices/42", "/prices/{*}"));
  CHECK(paths_overlap("/prices", "/prices/{*}"));
  CHECK(paths_overlap("/prices/{*}/x", "/prices"));
  CHECK_FALSE(paths_overlap("/price", "/prices"));
  CHECK_FALSE(paths_overlap("/stores/1", "/prices/{*}"));
  CHECK(paths_overlap("/", "/"));
  CHECK_FALSE(paths_overlap("/", "/prices"));
  CHECK_FALSE(paths_overlap("/prices", "/"));
}

TEST_CASE("parse_service_url") {
  auto u = parse_service_url("http://configserver:8888/config");
  REQUIRE(u);
  CHECK(u->scheme == "http");
  CHECK(u->host == "configserver");
  CHECK(u->port == 8888u);
  CHECK(u->path == "/config");

  auto bare = parse_service_url("https://Prices");
  REQUIRE(bare);
  CHECK(bare->host == "Prices");
  CHECK_FALSE(bare->port);
  CHECK_FALSE(bare->path);

  auto lb = parse_service_url("  lb://customers/customers/{id}  ");
  REQUIRE(lb);
  CHECK(lb->path == "/customers/{*}");

  CHECK_FALSE(parse_service_url("ftp://prices/x"));
  CHECK_FALSE(parse_service_url("http://"));
  CHECK_FALSE(parse_service_url("see http://prices/x"));
  CHECK_FALSE(parse_service_url("http://prices:notaport/"));
  CHECK_FALSE(parse_service_url("/prices"));
}

TEST_CASE("endpoints_in_source: class prefix plus method mapping") {
  auto eps = endpoints_in_source("prices", R"(
@RestController
@RequestMapping("/prices")
public class PricesController {
    @GetMapping("/{itemId}")
    public String price(@PathVariable String itemId) { return ""; }
}
)",
                                 "P.java");
  REQUIRE(eps.size() == 1);
  CHECK(eps[0].service == "prices");
  CHECK(eps[0].http_method == HttpMethod::GET);
  CHECK(eps[0].path == "/prices/{*}");
  CHECK(eps[0].line == 5);
  CHECK(eps[0].file == "P.java");
}

TEST_CASE("endpoints_in_source: RequestMapping without method is ANY") {
  auto eps = endpoints_in_source("s", R"(
class C {
  @RequestMapping("/health")
  String h() { return "ok"; }
  @RequestMapping(value = "/x", method = RequestMethod.PATCH)
  void x() {}
  @RequestMapping(path = {"/a", "/b"}, method = {RequestMethod.PUT, RequestMethod.POST})
  void ab() {}
}
)",
                                 "C.java");
  CHECK(routes(eps) == Routes{{HttpMethod::ANY, "/health"},
                              {HttpMethod::PATCH, "/x"},
                              {HttpMethod::PUT, "/a"},
                              {HttpMethod::POST, "/a"},
                              {HttpMethod::PUT, "/b"},
                              {HttpMethod::POST, "/b"}});
}

TEST_CASE("endpoints_in_source: shorthands, bare annotations and nested classes") {
  auto eps = endpoints_in_source("s", R"(
@RequestMapping("/outer")
class Outer {
  @GetMapping
  void root() {}
  @PostMapping(value = "/p")
  void p() {}
  @org.springframework.web.bind.annotation.PutMapping("/q")
  void q() {}
  @RequestMapping("/inner")
  static class Inner {
    @DeleteMapping("/{id}")
    void d() {}
  }
  @PatchMapping(path = "/after")
  void after() {}
}
)",
                                 "O.java");
  CHECK(routes(eps) == Routes{{HttpMethod::GET, "/outer"},
                              {HttpMethod::POST, "/outer/p"},
                              {HttpMethod::PUT, "/outer/q"},
                              {HttpMethod::DELETE, "/inner/{*}"},
                              {HttpMethod::PATCH, "/outer/after"}});
}

TEST_CASE("endpoints_in_source: annotations inside comments and strings are ignored") {
  auto eps = endpoints_in_source("s", R"j(
class C {
  // @GetMapping("/commented")
  /* @PostMapping("/block") */
  String s = "@GetMapping(\"/string\")";
}
)j",
                                 "C.java");
  CHECK(eps.empty());
}

TEST_CASE("call_sites_in_source: url literal") {
  auto sites = call_sites_in_source(
      "stores", "class A { String u = \"http://configserver:8888/config\"; }", "A.java",
      kServices);
  REQUIRE(sites.size() == 1);
  CHECK(sites[0].caller == "stores");
  CHECK(sites[0].target_host == "configserver");
  CHECK(sites[0].target_path == "/config");
  CHECK(sites[0].evidence == CallEvidence::url_literal);
  CHECK(sites[0].line == 1);
}

TEST_CASE("call_sites_in_source: host match is case-insensitive, canonical name kept") {
  auto sites = call_sites_in_source("stores", "String u = \"http://PRICES/prices/1\";", "A.java",
                                    kServices);
  REQUIRE(sites.size() == 1);
  CHECK(sites[0].target_host == "prices");
  CHECK(sites[0].target_path == "/prices/1");
}

TEST_CASE("call_sites_in_source: no known hosts") {
  CHECK(call_sites_in_source("stores",
                             R"(String a = "http://example.com/x";
String b = "configserver";
String c = "http://" + "prices/x";
// "http://prices/x"
)",
                             "A.java", kServices)
            .empty());
}

TEST_CASE("call_sites_in_source: declarative client") {
  auto sites = call_sites_in_source("accounts", R"(
@FeignClient(name = "customers")
public interface CustomersClient {
    @GetMapping("/customers/{id}")
    String byId(@PathVariable("id") long id);
}
)",
                                    "C.java", kServices);
  REQUIRE(sites.size() == 2);
  CHECK(sites[0].target_host == "customers");
  CHECK(sites[0].evidence == CallEvidence::declarative_client);
  CHECK_FALSE(sites[0].target_path);
  CHECK(sites[1].target_host == "customers");
  CHECK(sites[1].target_path == "/customers/{*}");
  CHECK(sites[1].line == 4);

  SUBCASE("client methods are not endpoints of the caller") {
    CHECK(endpoints_in_source("accounts", R"(
@FeignClient("customers")
interface CustomersClient {
    @GetMapping("/customers/{id}")
    String byId(long id);
}
)",
                              "C.java")
              .empty());
  }
  SUBCASE("value, url and unknown names") {
    auto v = call_sites_in_source("accounts", "@FeignClient(value = \"Prices\") interface P {}",
                                  "P.java", kServices);
    REQUIRE(v.size() == 1);
    CHECK(v[0].target_host == "prices");
    auto u = call_sites_in_source(
        "accounts", "@FeignClient(name = \"x\", url = \"http://stores:8081\") interface S {}",
        "S.java", kServices);
    REQUIRE(u.size() == 1);
    CHECK(u[0].target_host == "stores");
    CHECK(call_sites_in_source("accounts", "@FeignClient(name = \"billing\") interface B {}",
                               "B.java", kServices)
              .empty());
  }
}

TEST_CASE("call_sites_in_config") {
  auto sites = call_sites_in_config("prices",
                                    "server.port=8083\n"
                                    "spring.config.import=optional:configserver:http://"
                                    "configserver:8888/\n"
                                    "other=https://github.com/x\n"
                                    "lb=lb://stores/stores\n",
                                    "application.properties", kServices);
  REQUIRE(sites.size() == 2);
  CHECK(sites[0].target_host == "configserver");
  CHECK(sites[0].evidence == CallEvidence::config_property);
  CHECK(sites[0].line == 2);
  CHECK(sites[1].target_host == "stores");
  CHECK(sites[1].line == 4);
  CHECK(sites[1].target_path == "/stores");
}

TEST_CASE("extract_endpoints on the fixture") {
  auto root = fixture("tap-and-eat");
  CHECK(routes(extract_endpoints("prices", root / "prices")) ==
        Routes{{HttpMethod::GET, "/prices/{*}"}});
  CHECK(routes(extract_endpoints("accounts", root / "accounts")) ==
        Routes{{HttpMethod::GET, "/accounts/{*}"},
               {HttpMethod::PUT, "/accounts/{*}/deposit"},
               {HttpMethod::POST, "/accounts/{*}/deposit"}});
  CHECK(routes(extract_endpoints("customers", root / "customers")) ==
        Routes{{HttpMethod::GET, "/customers/{*}"}, {HttpMethod::DELETE, "/customers/{*}"}});
  CHECK(routes(extract_endpoints("stores", root / "stores-service")) ==
        Routes{{HttpMethod::GET, "/stores"},
               {HttpMethod::GET, "/stores/{*}"},
               {HttpMethod::POST, "/stores"}});
  CHECK(extract_endpoints("configserver", root / "configserver").empty());
}

TEST_CASE("extract_endpoints: no java files") {
  TempDir tmp;
  tmp.write("README.md", "@GetMapping(\"/x\")");
  CHECK(extract_endpoints("s", tmp.path()).empty());
}

TEST_CASE("extract_call_sites on the fixture") {
  auto root = fixture("tap-and-eat");
  for (auto [svc, dir] : std::vector<std::pair<std::string, std::string>>{
           {"stores", "stores-service"},
           {"accounts", "accounts"},
           {"customers", "customers"},
           {"prices", "prices"}}) {
    CAPTURE(svc);
    auto sites = extract_call_sites(svc, root / dir, kServices);
    REQUIRE(sites.size() == 1);
    CHECK(sites[0].target_host == "configserver");
    CHECK(sites[0].evidence == CallEvidence::config_property);
  }
  // The only URL in configserver names an external host.
  CHECK(extract_call_sites("configserver", root / "configserver", kServices).empty());
}

TEST_CASE("extract_call_sites skips test roots, build output and large files") {
  TempDir tmp;
  tmp.write("src/main/java/A.java", "class A { String u = \"http://prices/p\"; }");
  tmp.write("src/test/java/T.java", "class T { String u = \"http://customers/c\"; }");
  tmp.write("src/tests/java/T.java", "class T { String u = \"http://customers/c\"; }");
  tmp.write("target/classes/x.properties", "u=http://customers/c\n");
  std::string big = "class G { String u = \"http://customers/c\"; }\n";
  big.resize(kMaxScannedFileSize + 10, ' ');
  tmp.write("src/main/java/Generated.java", big);

  Warnings w;
  auto sites = extract_call_sites("stores", tmp.path(), kServices, &w);
  REQUIRE(sites.size() == 1);
  CHECK(sites[0].target_host == "prices");
  CHECK(w.size() == 1);
}

TEST_CASE("extract_* are deterministic and monotone") {
  TempDir tmp;
  auto write_random = [&](std::mt19937& rng, int k) {
    static const std::vector<std::string> bodies = {
        "@RestController @RequestMapping(\"/r\") class R { @GetMapping(\"/{id}\") void g() {} }",
        "class U { String u = \"http://prices:8083/prices/7\"; }",
        "@FeignClient(\"customers\") interface F { @PostMapping(\"/customers\") void p(); }",
        "class N { // http://stores/x\n }",
        "class P { @PutMapping void put() {} }"};
    tmp.write("src/main/java/p" + std::to_string(k % 3) + "/F" + std::to_string(k) + ".java",
              bodies[rng() % bodies.size()]);
  };

  std::mt19937 rng(5);
  std::vector<Endpoint> prev_eps;
  std::vector<CallSite> prev_sites;
  for (int k = 0; k < 30; ++k) {
    write_random(rng, k);
    auto eps = extract_endpoints("stores", tmp.path());
    auto sites = extract_call_sites("stores", tmp.path(), kServices);
    CHECK(extract_endpoints("stores", tmp.path()) == eps);
    CHECK(extract_call_sites("stores", tmp.path(), kServices) == sites);
    for (const auto& e : prev_eps)
      CHECK(std::find(eps.begin(), eps.end(), e) != eps.end());
    for (const auto& s : prev_sites)
      CHECK(std::find(sites.begin(), sites.end(), s) != sites.end());
    prev_eps = eps;
    prev_sites = sites;
  }
}

TEST_CASE("api_dependencies") {
  auto site = [](std::string from, std::string to, std::optional<std::string> path,
                 std::string file) {
    return CallSite{std::move(from), std::move(to), std::move(path), std::move(file), 1,
                    CallEvidence::url_literal};
  };

  SUBCASE("empty") { CHECK(api_dependencies({}, {}).empty()); }

  SUBCASE("two sites in different files give one edge") {
    std::vector<CallSite> sites = {site("stores", "prices", "/prices/1", "A.java"),
                                   site("stores", "prices", "/prices/2", "B.java")};
    auto edges = api_dependencies(sites, {});
    REQUIRE(edges.size() == 1);
    CHECK(edges[0].source == "stores");
    CHECK(edges[0].target == "prices");
    CHECK(edges[0].kind == EdgeKind::api);
    CHECK_FALSE(edges[0].endpoint_matched);
  }

  SUBCASE("first-occurrence order, self-calls dropped, match flag") {
    std::vector<CallSite> sites = {site("b", "c", std::nullopt, "1"),
                                   site("a", "a", "/x", "2"),
                                   site("a", "b", "/nomatch", "3"),
                                   site("a", "b", "/items/9", "4"),
                                   site("b", "c", "/orders", "5")};
    std::vector<Endpoint> eps = {{"b", HttpMethod::GET, "/items/{*}", "E.java", 1},
                                 {"a", HttpMethod::GET, "/orders", "E.java", 2}};
    auto edges = api_dependencies(sites, eps);
    REQUIRE(edges.size() == 2);
    CHECK(edges[0].source == "b");
    CHECK(edges[0].target == "c");
    CHECK_FALSE(edges[0].endpoint_matched);
    CHECK(edges[1].source == "a");
    CHECK(edges[1].target == "b");
    CHECK(edges[1].endpoint_matched);
  }

  SUBCASE("fixture call sites reproduce the config edges") {
    auto root = fixture("tap-and-eat");
    std::vector<CallSite> all;
    for (auto [svc, dir] : std::vector<std::pair<std::string, std::string>>{
             {"stores", "stores-service"},
             {"configserver", "configserver"},
             {"accounts", "accounts"},
             {"customers", "customers"},
             {"prices", "prices"}}) {
      auto s = extract_call_sites(svc, root / dir, kServices);
      all.insert(all.end(), s.begin(), s.end());
    }
    auto edges = api_dependencies(all, {});
    REQUIRE(edges.size() == 4);
    for (const auto& e : edges) {
      CHECK(e.target == "configserver");
      CHECK(e.source != e.target);
    }
  }
}
