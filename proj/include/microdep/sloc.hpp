#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "microdep/error.hpp"

namespace microdep {

namespace fs = std::filesystem;

enum class Language { java };

struct SlocReport {
  /// Keyed by path relative to the project root, generic separators.
  std::map<std::string, std::size_t> per_file;
  std::map<std::string, std::size_t> per_service;
  std::size_t total = 0;
  /// total / 1000 with exactly three decimals.
  std::string kloc = "0.000";

  double kloc_value() const { return static_cast<double>(total) / 1000.0; }

  bool operator==(const SlocReport&) const = default;
};

/// Physical lines that still hold a non-whitespace character once comments
/// are removed.
std::size_t count_file(std::string_view text, Language language = Language::java);

/// Renders a line count in thousands with three decimals, rounding half up.
std::string format_kloc(std::size_t lines);

/// Counts every Java file under `project_root`, skipping VCS metadata and
/// `target`/`build` output. A file belongs to the service whose directory
/// contains it most specifically.
SlocReport count_project(const fs::path& project_root,
                         const std::map<std::string, std::optional<fs::path>>& service_dirs = {},
                         Warnings* warnings = nullptr);

} // namespace microdep
