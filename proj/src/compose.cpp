#include "microdep/compose.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include <yaml-cpp/yaml.h>

namespace microdep {

namespace {

constexpr std::array<std::string_view, 4> kComposeNames = {
    "docker-compose.yml", "docker-compose.yaml", "compose.yml", "compose.yaml"};

using Entries = std::vector<std::pair<std::string, YAML::Node>>;

std::string where(const YAML::Node& node) {
  auto mark = node.Mark();
  if (mark.is_null())
    return {};
  return " (line " + std::to_string(mark.line + 1) + ")";
}

std::string key_text(const YAML::Node& key) {
  if (!key.IsScalar())
    throw ParseError("mapping key is not a scalar" + where(key));
  return key.Scalar();
}

/// Entries of a YAML mapping in document order with `<<` merge keys
/// expanded in place. Keys written explicitly take precedence over merged
/// ones; among several merged maps the earlier one wins.
Entries map_entries(const YAML::Node& map, int depth = 0) {
  if (depth > 32)
    throw ParseError("merge keys nested too deeply" + where(map));

  std::set<std::string, std::less<>> explicit_keys;
  for (const auto& kv : map) {
    auto key = key_text(kv.first);
    if (key == "<<")
      continue;
    if (!explicit_keys.insert(key).second)
      throw ParseError("duplicate key '" + key + "'" + where(kv.first));
  }

  Entries out;
  std::set<std::string, std::less<>> seen;
  auto merge_from = [&](const YAML::Node& source) {
    if (!source.IsMap())
      throw ParseError("merge value is not a mapping" + where(source));
    for (auto& [k, v] : map_entries(source, depth + 1)) {
      if (explicit_keys.contains(k) || seen.contains(k))
        continue;
      seen.insert(k);
      out.emplace_back(std::move(k), std::move(v));
    }
  };

  for (const auto& kv : map) {
    auto key = key_text(kv.first);
    if (key != "<<") {
      seen.insert(key);
      out.emplace_back(std::move(key), kv.second);
      continue;
    }
    if (kv.second.IsSequence()) {
      for (const auto& item : kv.second)
        merge_from(item);
    } else {
      merge_from(kv.second);
    }
  }
  return out;
}

const YAML::Node* find_entry(const Entries& entries, std::string_view key) {
  for (const auto& [k, v] : entries)
    if (k == key)
      return &v;
  return nullptr;
}

std::optional<std::string> scalar_value(const YAML::Node* node,
                                        const Environment& env) {
  if (node == nullptr || !node->IsScalar())
    return std::nullopt;
  return interpolate(node->Scalar(), env);
}

std::optional<std::string> build_context_of(const YAML::Node* build,
                                            const Environment& env) {
  if (build == nullptr || build->IsNull())
    return std::nullopt;
  if (build->IsScalar())
    return interpolate(build->Scalar(), env);
  if (build->IsMap()) {
    auto entries = map_entries(*build);
    if (auto ctx = scalar_value(find_entry(entries, "context"), env))
      return ctx;
    return std::string(".");
  }
  return std::nullopt;
}

void collect_names(const YAML::Node* node, bool strip_alias,
                   const std::string& service, const Environment& env,
                   std::vector<std::string>& out, Warnings* warnings) {
  if (node == nullptr || node->IsNull())
    return;

  auto add = [&](const YAML::Node& item) {
    if (!item.IsScalar()) {
      if (warnings)
        warnings->push_back("service '" + service +
                            "': ignoring non-scalar dependency entry" +
                            where(item));
      return;
    }
    auto name = interpolate(item.Scalar(), env);
    if (strip_alias)
      name = name.substr(0, name.find(':'));
    if (!name.empty())
      out.push_back(std::move(name));
  };

  if (node->IsSequence()) {
    for (const auto& item : *node)
      add(item);
  } else if (node->IsMap()) {
    // Long form of depends_on: only the keys name services.
    for (auto& [key, value] : map_entries(*node))
      out.push_back(interpolate(key, env));
  } else {
    add(*node);
  }
}

ServiceDescriptor read_service(const std::string& name, const YAML::Node& body,
                               std::size_t index, const Environment& env,
                               Warnings* warnings) {
  ServiceDescriptor svc;
  svc.name = name;
  svc.decl_index = index;
  if (body.IsNull())
    return svc;
  if (!body.IsMap())
    throw ParseError("service '" + name + "' is not a mapping" + where(body));

  auto entries = map_entries(body);
  svc.image = scalar_value(find_entry(entries, "image"), env);
  svc.build_context = build_context_of(find_entry(entries, "build"), env);

  std::vector<std::string> raw;
  collect_names(find_entry(entries, "depends_on"), false, name, env, raw,
                warnings);
  collect_names(find_entry(entries, "links"), true, name, env, raw, warnings);

  std::set<std::string, std::less<>> seen;
  for (auto& dep : raw) {
    if (dep == name) {
      if (warnings)
        warnings->push_back("service '" + name + "' lists itself as a dependency");
      continue;
    }
    if (seen.insert(dep).second)
      svc.declared_deps.push_back(std::move(dep));
  }
  return svc;
}

bool is_v1_reserved(std::string_view key) {
  static constexpr std::array<std::string_view, 6> reserved = {
      "version", "name", "networks", "volumes", "secrets", "configs"};
  return key.starts_with("x-") ||
         std::find(reserved.begin(), reserved.end(), key) != reserved.end();
}

std::string fold_name(std::string_view name, bool unify_separators) {
  std::string out;
  out.reserve(name.size());
  for (char c : name) {
    if (unify_separators && c == '_')
      c = '-';
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

fs::path normal_dir(const fs::path& p) {
  auto n = p.lexically_normal();
  if (!n.empty() && n.filename().empty())
    n = n.parent_path();
  return n;
}

bool is_remote_context(std::string_view ctx) {
  return ctx.find("://") != std::string_view::npos || ctx.starts_with("git@") ||
         ctx.starts_with("github.com/");
}

} // namespace

const ServiceDescriptor* ComposeModel::find(std::string_view name) const {
  for (const auto& s : services)
    if (s.name == name)
      return &s;
  return nullptr;
}

std::vector<std::string> ComposeModel::service_names() const {
  std::vector<std::string> names;
  names.reserve(services.size());
  for (const auto& s : services)
    names.push_back(s.name);
  return names;
}

std::string interpolate(std::string_view value, const Environment& env) {
  std::string out;
  out.reserve(value.size());

  auto lookup = [&](std::string_view var) -> const std::string* {
    auto it = env.find(var);
    return it == env.end() ? nullptr : &it->second;
  };
  auto is_ident = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  };

  for (std::size_t i = 0; i < value.size(); ++i) {
    char c = value[i];
    if (c != '$' || i + 1 >= value.size()) {
      out.push_back(c);
      continue;
    }
    char next = value[i + 1];
    if (next == '$') {
      out.push_back('$');
      ++i;
    } else if (next == '{') {
      auto close = value.find('}', i + 2);
      if (close == std::string_view::npos) {
        out.append(value.substr(i));
        break;
      }
      auto expr = value.substr(i + 2, close - i - 2);
      std::size_t name_end = 0;
      while (name_end < expr.size() && is_ident(expr[name_end]))
        ++name_end;
      auto var = expr.substr(0, name_end);
      auto rest = expr.substr(name_end);
      const std::string* found = lookup(var);
      if (rest.starts_with(":-")) {
        out.append(found && !found->empty() ? std::string_view(*found)
                                            : rest.substr(2));
      } else if (rest.starts_with("-")) {
        out.append(found ? std::string_view(*found) : rest.substr(1));
      } else if (found) {
        // `:?` / `?` error forms degrade to plain substitution.
        out.append(*found);
      }
      i = close;
    } else if (is_ident(next)) {
      std::size_t end = i + 1;
      while (end < value.size() && is_ident(value[end]))
        ++end;
      if (const auto* found = lookup(value.substr(i + 1, end - i - 1)))
        out.append(*found);
      i = end - 1;
    } else {
      out.push_back(c);
    }
  }
  return out;
}

fs::path locate_compose_file(const fs::path& project_root) {
  std::error_code ec;
  if (!fs::is_directory(project_root, ec))
    throw NotFound("project root is not a directory: " + project_root.string());

  for (auto name : kComposeNames) {
    auto candidate = project_root / name;
    if (fs::is_regular_file(candidate, ec))
      return candidate;
  }

  std::vector<fs::path> subdirs;
  for (const auto& entry : fs::directory_iterator(project_root, ec))
    if (entry.is_directory(ec))
      subdirs.push_back(entry.path());
  std::sort(subdirs.begin(), subdirs.end());

  for (auto name : kComposeNames)
    for (const auto& dir : subdirs)
      if (fs::is_regular_file(dir / name, ec))
        return dir / name;

  throw NotFound("no docker-compose file under " + project_root.string());
}

ComposeModel parse_compose(std::string_view text, const fs::path& source_path,
                           const Environment& env, Warnings* warnings) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw ParseError(source_path.string() + ": " + e.what());
  }

  if (!root.IsDefined() || root.IsNull())
    throw EmptyModel(source_path.string() + ": empty compose file");
  if (!root.IsMap())
    throw ParseError(source_path.string() + ": top level is not a mapping");

  ComposeModel model;
  model.source_path = source_path;

  try {
    auto top = map_entries(root);
    Entries service_entries;
    if (const auto* services = find_entry(top, "services")) {
      if (services->IsMap())
        service_entries = map_entries(*services);
      else if (!services->IsNull())
        throw ParseError("'services' is not a mapping" + where(*services));
    } else {
      // Version 1 layout: services live at the top level.
      for (auto& [key, value] : top)
        if (!is_v1_reserved(key) && (value.IsMap() || value.IsNull()))
          service_entries.emplace_back(key, value);
    }

    for (auto& [name, body] : service_entries) {
      if (name.empty())
        throw ParseError("service with an empty name" + where(body));
      model.services.push_back(
          read_service(name, body, model.services.size(), env, warnings));
    }
  } catch (const ParseError& e) {
    throw ParseError(source_path.string() + ": " + e.what());
  } catch (const YAML::Exception& e) {
    throw ParseError(source_path.string() + ": " + e.what());
  }

  if (model.services.empty())
    throw EmptyModel(source_path.string() + ": no services declared");
  return model;
}

ComposeModel load_compose(const fs::path& path, const Environment& env,
                          Warnings* warnings) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw NotFound("cannot read compose file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_compose(buf.str(), path, env, warnings);
}

std::vector<DependencyEdge> config_dependencies(const ComposeModel& model,
                                                Warnings* warnings) {
  std::vector<DependencyEdge> edges;
  for (const auto& svc : model.services) {
    for (const auto& dep : svc.declared_deps) {
      if (dep == svc.name)
        continue;
      if (model.find(dep) == nullptr) {
        if (warnings)
          warnings->push_back("service '" + svc.name +
                              "' depends on undeclared service '" + dep + "'");
        continue;
      }
      edges.push_back({svc.name, dep, EdgeKind::config, false});
    }
  }
  return edges;
}

std::map<std::string, std::optional<fs::path>>
resolve_service_sources(const ComposeModel& model, const fs::path& project_root,
                        Warnings* warnings) {
  std::error_code ec;
  auto root = normal_dir(project_root);
  auto compose_dir = normal_dir(model.source_path.parent_path());
  if (compose_dir.empty())
    compose_dir = root;

  std::vector<fs::path> children;
  for (const auto& entry : fs::directory_iterator(root, ec))
    if (entry.is_directory(ec))
      children.push_back(entry.path().filename());
  std::sort(children.begin(), children.end());

  auto match_child = [&](const std::string& service) -> std::optional<fs::path> {
    for (bool unify : {false, true}) {
      auto wanted = fold_name(service, unify);
      for (const auto& child : children)
        if (fold_name(child.string(), unify) == wanted)
          return root / child;
    }
    return std::nullopt;
  };

  std::map<std::string, std::optional<fs::path>> out;
  for (const auto& svc : model.services) {
    std::optional<fs::path> dir;
    if (svc.build_context && !is_remote_context(*svc.build_context)) {
      auto candidate = normal_dir(compose_dir / *svc.build_context);
      if (fs::is_directory(candidate, ec))
        dir = candidate;
      else if (warnings)
        warnings->push_back("service '" + svc.name + "': build context " +
                            candidate.string() + " is not a directory");
    }
    if (!dir)
      dir = match_child(svc.name);
    out.emplace(svc.name, std::move(dir));
  }
  return out;
}

} // namespace microdep
