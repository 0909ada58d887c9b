#include "microdep/fs_walk.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace microdep {

std::vector<fs::path> list_files(const fs::path& root,
                                 const std::function<bool(const fs::path&)>& want,
                                 const WalkOptions& options, Warnings* warnings) {
  std::vector<fs::path> files;
  std::error_code ec;
  fs::recursive_directory_iterator it(
      root, fs::directory_options::skip_permission_denied, ec);
  if (ec) {
    if (warnings)
      warnings->push_back("cannot list " + root.string() + ": " + ec.message());
    return files;
  }

  for (; it != fs::recursive_directory_iterator(); it.increment(ec)) {
    if (ec) {
      if (warnings)
        warnings->push_back("walk error under " + root.string() + ": " + ec.message());
      break;
    }
    const auto& entry = *it;
    auto name = entry.path().filename().string();
    if (entry.is_directory(ec) && !entry.is_symlink(ec)) {
      bool skip = std::find(options.skip_dirs.begin(), options.skip_dirs.end(),
                            name) != options.skip_dirs.end();
      if (!skip && options.skip_test_roots && (name == "test" || name == "tests"))
        skip = entry.path().parent_path().filename() == "src";
      if (skip)
        it.disable_recursion_pending();
      continue;
    }
    if (entry.is_regular_file(ec) && want(entry.path()))
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

bool has_extension(const fs::path& path, std::initializer_list<std::string_view> exts) {
  auto ext = path.extension().string();
  return std::find(exts.begin(), exts.end(), ext) != exts.end();
}

bool read_file(const fs::path& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    return false;
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad())
    return false;
  out = std::move(buf).str();
  return true;
}

} // namespace microdep
