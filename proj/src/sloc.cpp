#include "microdep/sloc.hpp"

#include <vector>

#include "microdep/fs_walk.hpp"

namespace microdep {

namespace {

bool is_blank(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v';
}

enum class State { code, block_comment, string, character, text_block };

} // namespace

std::size_t count_file(std::string_view text, Language /*language*/) {
  std::size_t count = 0;
  bool has_code = false;
  State state = State::code;

  auto at = [&](std::size_t i) { return i < text.size() ? text[i] : '\0'; };

  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == '\n') {
      if (has_code)
        ++count;
      has_code = false;
      // Ordinary literals cannot span lines.
      if (state == State::string || state == State::character)
        state = State::code;
      continue;
    }

    switch (state) {
    case State::code:
      if (c == '/' && at(i + 1) == '/') {
        while (i + 1 < text.size() && text[i + 1] != '\n')
          ++i;
      } else if (c == '/' && at(i + 1) == '*') {
        state = State::block_comment;
        ++i;
      } else if (c == '"' && at(i + 1) == '"' && at(i + 2) == '"') {
        has_code = true;
        state = State::text_block;
        i += 2;
      } else if (c == '"') {
        has_code = true;
        state = State::string;
      } else if (c == '\'') {
        has_code = true;
        state = State::character;
      } else if (!is_blank(c)) {
        has_code = true;
      }
      break;
    case State::block_comment:
      if (c == '*' && at(i + 1) == '/') {
        state = State::code;
        ++i;
      }
      break;
    case State::string:
    case State::character:
      has_code = true;
      if (c == '\\' && at(i + 1) != '\n')
        ++i;
      else if (c == (state == State::string ? '"' : '\''))
        state = State::code;
      break;
    case State::text_block:
      if (!is_blank(c))
        has_code = true;
      if (c == '\\' && at(i + 1) != '\n' && at(i + 1) != '\0')
        ++i;
      else if (c == '"' && at(i + 1) == '"' && at(i + 2) == '"') {
        state = State::code;
        i += 2;
      }
      break;
    }
  }
  if (has_code)
    ++count;
  return count;
}

std::string format_kloc(std::size_t lines) {
  // lines / 1000 is exact at three decimals, so no rounding step is needed.
  auto frac = std::to_string(lines % 1000);
  return std::to_string(lines / 1000) + "." + std::string(3 - frac.size(), '0') + frac;
}

SlocReport count_project(const fs::path& project_root,
                         const std::map<std::string, std::optional<fs::path>>& service_dirs,
                         Warnings* warnings) {
  auto root = project_root.lexically_normal();

  struct Scope {
    std::string service;
    fs::path dir;
  };
  std::vector<Scope> scopes;
  for (const auto& [name, dir] : service_dirs)
    if (dir)
      scopes.push_back({name, dir->lexically_normal()});

  auto owner = [&](const fs::path& file) -> const Scope* {
    const Scope* best = nullptr;
    std::size_t best_len = 0;
    for (const auto& s : scopes) {
      auto rel = file.lexically_relative(s.dir);
      if (rel.empty() || *rel.begin() == "..")
        continue;
      auto len = std::distance(s.dir.begin(), s.dir.end());
      if (!best || static_cast<std::size_t>(len) > best_len) {
        best = &s;
        best_len = static_cast<std::size_t>(len);
      }
    }
    return best;
  };

  SlocReport report;
  for (const auto& [name, dir] : service_dirs)
    if (dir)
      report.per_service[name] = 0;

  auto files = list_files(
      root, [](const fs::path& p) { return has_extension(p, {".java"}); }, {}, warnings);
  std::string text;
  for (const auto& file : files) {
    std::size_t n = 0;
    if (read_file(file, text))
      n = count_file(text);
    else if (warnings)
      warnings->push_back("cannot read " + file.string() + "; counted as 0 lines");

    auto normal = file.lexically_normal();
    report.per_file[normal.lexically_relative(root).generic_string()] = n;
    report.total += n;
    if (const auto* s = owner(normal))
      report.per_service[s->service] += n;
  }
  report.kloc = format_kloc(report.total);
  return report;
}

} // namespace microdep
