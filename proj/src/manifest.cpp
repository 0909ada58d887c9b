#include "microdep/manifest.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <map>

#include "microdep/fs_walk.hpp"

namespace microdep {

namespace {

// Repositories that could not be traced back from their shortened link keep
// the short link as repo_url; fetching them reports the project unavailable.
constexpr std::string_view kDefaultManifest = R"(# Reference corpus: twenty open-source microservice projects.
# services/deps/kloc/commits are the published reference measurements.
# pinned_rev is left empty; pin revisions contemporary with the reference
# measurements to reproduce them.
name,repo_url,pinned_rev,services,kloc,commits,deps,type,kloc_exempt,short_url
Consul demo,http://bit.ly/2KsGzx6,,5,2.343,78,4,Demo,,http://bit.ly/2KsGzx6
CQRS microservice application,http://bit.ly/2YtbtiF,,7,1.632,86,3,Demo,,http://bit.ly/2YtbtiF
E-Commerce App,http://bit.ly/2yLqTPW,,7,0.967,20,4,Demo,,http://bit.ly/2yLqTPW
EnterprisePlanner,http://bit.ly/2ZPK7je,,5,4.264,49,2,Demo,,http://bit.ly/2ZPK7je
eShopOnContainers,https://github.com/dotnet-architecture/eShopOnContainers,,25,69.874,3246,18,Demo,yes,http://bit.ly/2YGSkJB
FTGO - Restaurant Management,https://github.com/microservices-patterns/ftgo-application,,13,9.366,172,9,Demo,,http://bit.ly/2M7f8fm
Lakeside Mutual Insurance Company,https://github.com/Microservice-API-Patterns/LakesideMutual,,8,19.363,12,7,Demo,,http://bit.ly/33iJSiU
Lelylan - Open Source Internet of Things,https://github.com/lelylan/lelylan,,14,77.63,2059,11,Industrial,yes,http://bit.ly/2TdDfd3
Microservice Architecture for blog post,http://bit.ly/2OKY29v,,9,1.536,90,7,Demo,,http://bit.ly/2OKY29v
Microservices book,http://bit.ly/2TeSbI2,,6,2.417,127,5,Demo,,http://bit.ly/2TeSbI2
Open-loyalty,https://github.com/DivanteLtd/open-loyalty,,5,16.641,71,2,Industrial,yes,http://bit.ly/2ZApXtA
Pitstop - Garage Management System,https://github.com/EdwinVW/pitstop,,13,34.625,198,9,Demo,yes,http://bit.ly/2Td7NLY
Robot Shop,https://github.com/instana/robot-shop,,12,2.523,208,8,Demo,yes,http://bit.ly/2ZFbHQm
Share bike (Chinese),http://bit.ly/2YMJgmb,,9,3.02,62,6,Demo,,http://bit.ly/2YMJgmb
Spinnaker,https://github.com/spinnaker/spinnaker,,10,33.822,1669,6,Industrial,yes,http://bit.ly/2YQA2S7
Spring Cloud Microservice Example,https://github.com/kbastani/spring-cloud-microservice-example,,10,2.333,35,9,Demo,,http://bit.ly/2GS2ywt
Spring PetClinic,https://github.com/spring-petclinic/spring-petclinic-microservices,,8,2.475,658,7,Demo,,http://bit.ly/2YMVbAC
Spring-cloud-netflix-example,https://github.com/yidongnan/spring-cloud-netflix-example,,9,0.419,61,6,Demo,,http://bit.ly/2YOUJxJ
Tap-And-Eat (Spring Cloud),https://github.com/jferrater/Tap-And-Eat-MicroServices,,5,1.418,35,4,Demo,,http://bit.ly/2yIjXmC
Vehicle tracking,http://bit.ly/31i5aLM,,8,5.462,116,5,Demo,,http://bit.ly/31i5aLM
)";

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back().push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back().push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back().push_back(c);
    }
  }
  for (auto& f : fields)
    f = std::string(trim(f));
  return fields;
}

template <typename T>
T parse_number(std::string_view text, std::string_view column, const std::string& where) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
    throw ManifestError(where + ": column '" + std::string(column) +
                        "' is not a number: '" + std::string(text) + "'");
  return value;
}

bool parse_flag(std::string_view text) {
  std::string lower(text);
  for (auto& c : lower)
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return lower == "yes" || lower == "true" || lower == "1" || lower == "y";
}

} // namespace

std::string_view to_string(ProjectType type) {
  return type == ProjectType::Industrial ? "Industrial" : "Demo";
}

std::string_view default_manifest_text() { return kDefaultManifest; }

std::vector<ProjectRecord> parse_manifest(std::string_view text, std::string_view origin) {
  static constexpr std::array<std::string_view, 8> required = {
      "name", "repo_url", "pinned_rev", "services", "kloc", "commits", "deps", "type"};

  std::vector<ProjectRecord> records;
  std::map<std::string, std::size_t, std::less<>> column;
  std::size_t line_no = 0;
  std::size_t start = 0;

  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos)
      end = text.size();
    auto line = trim(text.substr(start, end - start));
    start = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#')
      continue;

    auto fields = split_csv(line);
    std::string where = std::string(origin) + ":" + std::to_string(line_no);

    if (column.empty()) {
      for (std::size_t i = 0; i < fields.size(); ++i)
        column.emplace(fields[i], i);
      for (auto name : required)
        if (!column.contains(name))
          throw ManifestError(where + ": header lacks column '" + std::string(name) + "'");
      continue;
    }

    auto get = [&](std::string_view name) -> std::string_view {
      auto it = column.find(name);
      if (it == column.end() || it->second >= fields.size()) {
        if (std::find(required.begin(), required.end(), name) != required.end())
          throw ManifestError(where + ": missing value for column '" + std::string(name) + "'");
        return {};
      }
      return fields[it->second];
    };

    ProjectRecord r;
    r.name = std::string(get("name"));
    if (r.name.empty())
      throw ManifestError(where + ": empty project name");
    r.repo_url = std::string(get("repo_url"));
    if (auto rev = get("pinned_rev"); !rev.empty())
      r.pinned_rev = std::string(rev);
    r.expected_services = parse_number<std::size_t>(get("services"), "services", where);
    r.expected_kloc = parse_number<double>(get("kloc"), "kloc", where);
    r.expected_commits = parse_number<std::size_t>(get("commits"), "commits", where);
    r.expected_deps = parse_number<std::size_t>(get("deps"), "deps", where);

    auto type = get("type");
    if (type == "Demo" || type == "demo")
      r.project_type = ProjectType::Demo;
    else if (type == "Industrial" || type == "industrial")
      r.project_type = ProjectType::Industrial;
    else
      throw ManifestError(where + ": unknown project type '" + std::string(type) + "'");

    r.kloc_exempt = parse_flag(get("kloc_exempt"));
    r.short_url = std::string(get("short_url"));

    if (r.expected_services < 1)
      throw ManifestError(where + ": services must be at least 1");
    if (r.expected_deps >= r.expected_services * r.expected_services)
      throw ManifestError(where + ": deps exceeds services squared");
    if (r.expected_kloc < 0.0)
      throw ManifestError(where + ": negative kloc");
    if (std::any_of(records.begin(), records.end(),
                    [&](const ProjectRecord& other) { return other.name == r.name; }))
      throw ManifestError(where + ": duplicate project name '" + r.name + "'");
    records.push_back(std::move(r));
  }

  if (column.empty())
    throw ManifestError(std::string(origin) + ": no header row");
  return records;
}

std::vector<ProjectRecord> load_manifest(const std::optional<fs::path>& path) {
  if (!path)
    return parse_manifest(default_manifest_text(), "<built-in manifest>");
  std::string text;
  if (!read_file(*path, text))
    throw ManifestError("cannot read manifest " + path->string());
  return parse_manifest(text, path->string());
}

} // namespace microdep
