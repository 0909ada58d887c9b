#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "microdep/error.hpp"

namespace microdep {

namespace fs = std::filesystem;

enum class ProjectType { Demo, Industrial };

std::string_view to_string(ProjectType type);

/// One row of the corpus manifest with the reference measurements.
struct ProjectRecord {
  std::string name;
  std::string repo_url;
  std::optional<std::string> pinned_rev;
  std::size_t expected_services = 1;
  double expected_kloc = 0.0;
  std::size_t expected_commits = 0;
  std::size_t expected_deps = 0;
  ProjectType project_type = ProjectType::Demo;
  /// Projects whose code base is mostly not Java; their KLOC is reported
  /// but never compared.
  bool kloc_exempt = false;
  /// Original shortened link, kept for reference.
  std::string short_url;

  bool operator==(const ProjectRecord&) const = default;
};

/// The built-in twenty-project manifest, as CSV text.
std::string_view default_manifest_text();

/// Parses comma-separated manifest text. The header names the columns
/// name, repo_url, pinned_rev, services, kloc, commits, deps and type in any
/// order; kloc_exempt and short_url are optional. Lines starting with '#'
/// and blank lines are ignored. Throws ManifestError.
std::vector<ProjectRecord> parse_manifest(std::string_view text,
                                          std::string_view origin = "<manifest>");

/// Reads `path`, or returns the built-in manifest when no path is given.
std::vector<ProjectRecord> load_manifest(const std::optional<fs::path>& path = std::nullopt);

} // namespace microdep
