#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "microdep/error.hpp"

namespace microdep {

namespace fs = std::filesystem;

struct WalkOptions {
  /// Directory names never descended into (VCS metadata, build output).
  std::vector<std::string> skip_dirs = {".git", ".hg", ".svn", "target",
                                        "build", "node_modules"};
  /// Skip `test`/`tests` directly beneath a directory named `src`.
  bool skip_test_roots = false;
};

/// All regular files under `root` accepted by `want`, sorted by path.
/// Directory symlinks are not followed.
std::vector<fs::path> list_files(const fs::path& root,
                                 const std::function<bool(const fs::path&)>& want,
                                 const WalkOptions& options = {},
                                 Warnings* warnings = nullptr);

bool has_extension(const fs::path& path, std::initializer_list<std::string_view> exts);

/// Reads a whole file; returns false on I/O failure.
bool read_file(const fs::path& path, std::string& out);

} // namespace microdep
