#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "microdep/depgraph.hpp"
#include "microdep/error.hpp"

namespace microdep {

namespace fs = std::filesystem;

struct ServiceDescriptor {
  std::string name;
  std::optional<std::string> image;
  std::optional<std::string> build_context;
  /// `depends_on` entries followed by `links` entries, first occurrence wins.
  std::vector<std::string> declared_deps;
  std::size_t decl_index = 0;

  bool operator==(const ServiceDescriptor&) const = default;
};

struct ComposeModel {
  std::vector<ServiceDescriptor> services;
  fs::path source_path;

  const ServiceDescriptor* find(std::string_view name) const;
  std::vector<std::string> service_names() const;

  bool operator==(const ComposeModel&) const = default;
};

/// Values substituted for `${VAR}` references in compose scalars. Unset
/// variables expand to the empty string.
using Environment = std::map<std::string, std::string, std::less<>>;

/// Finds the compose file of a project. The root directory is searched
/// before its immediate subdirectories; within each, the file names
/// docker-compose.yml, docker-compose.yaml, compose.yml and compose.yaml are
/// tried in that order. Throws NotFound when nothing matches.
fs::path locate_compose_file(const fs::path& project_root);

ComposeModel parse_compose(std::string_view text, const fs::path& source_path,
                           const Environment& env = {},
                           Warnings* warnings = nullptr);

/// Reads and parses a compose file from disk.
ComposeModel load_compose(const fs::path& path, const Environment& env = {},
                          Warnings* warnings = nullptr);

/// One config edge per declared dependency that names a service of the
/// model. Dangling names are reported through `warnings`.
std::vector<DependencyEdge> config_dependencies(const ComposeModel& model,
                                                Warnings* warnings = nullptr);

/// Maps every service to the directory holding its source code, if one can
/// be found. Services without a directory are config-only.
std::map<std::string, std::optional<fs::path>>
resolve_service_sources(const ComposeModel& model, const fs::path& project_root,
                        Warnings* warnings = nullptr);

/// Expands `$VAR`, `${VAR}`, `${VAR:-default}` and `${VAR-default}`;
/// `$$` produces a literal dollar sign.
std::string interpolate(std::string_view value, const Environment& env);

} // namespace microdep
