#include "microdep/code_analyzer.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <regex>
#include <set>
#include <utility>

#include "microdep/fs_walk.hpp"
#include "microdep/java_lexer.hpp"

namespace microdep {

std::string_view to_string(HttpMethod method) {
  switch (method) {
  case HttpMethod::GET: return "GET";
  case HttpMethod::POST: return "POST";
  case HttpMethod::PUT: return "PUT";
  case HttpMethod::DELETE: return "DELETE";
  case HttpMethod::PATCH: return "PATCH";
  case HttpMethod::ANY: return "ANY";
  }
  return "ANY";
}

std::string_view to_string(CallEvidence evidence) {
  switch (evidence) {
  case CallEvidence::url_literal: return "url-literal";
  case CallEvidence::declarative_client: return "declarative-client";
  case CallEvidence::config_property: return "config-property";
  }
  return "url-literal";
}

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out)
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> segments(std::string_view path) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= path.size()) {
    auto slash = path.find('/', start);
    if (slash == std::string_view::npos)
      slash = path.size();
    auto seg = path.substr(start, slash - start);
    if (!seg.empty())
      out.push_back(seg);
    start = slash + 1;
  }
  return out;
}

std::string canonical_segment(std::string_view seg) {
  std::string out;
  int depth = 0;
  for (char c : seg) {
    if (c == '{') {
      if (depth++ == 0)
        out.append("{*}");
    } else if (c == '}' && depth > 0) {
      --depth;
    } else if (depth == 0) {
      out.push_back(c);
    }
  }
  return out;
}

// Lower-cased service name -> compose spelling.
using ServiceIndex = std::map<std::string, std::string, std::less<>>;

ServiceIndex index_services(std::span<const std::string> known) {
  ServiceIndex idx;
  for (const auto& name : known)
    idx.emplace(lower(name), name);
  return idx;
}

const std::string* resolve_service(const ServiceIndex& idx, std::string_view name) {
  auto it = idx.find(lower(trim(name)));
  return it == idx.end() ? nullptr : &it->second;
}

// ---------------------------------------------------------------------------
// Annotation parsing over the token stream.

struct AttrValue {
  std::vector<std::string> strings;
  /// Last segment of every dotted name, e.g. GET for RequestMethod.GET.
  std::vector<std::string> names;
};

struct Annotation {
  std::string name;
  std::size_t line = 0;
  std::map<std::string, AttrValue, std::less<>> attrs;

  const AttrValue* attr(std::string_view key) const {
    auto it = attrs.find(key);
    return it == attrs.end() ? nullptr : &it->second;
  }

  std::vector<std::string> strings(std::initializer_list<std::string_view> keys) const {
    std::vector<std::string> out;
    for (auto k : keys)
      if (const auto* v = attr(k))
        out.insert(out.end(), v->strings.begin(), v->strings.end());
    return out;
  }
};

AttrValue read_value(std::span<const Token> toks) {
  AttrValue v;
  bool concat = false;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    const auto& t = toks[i];
    if (t.kind == TokenKind::string_literal) {
      if (concat && !v.strings.empty())
        v.strings.back() += t.text;
      else
        v.strings.push_back(t.text);
      concat = false;
    } else if (t.is_punct('+')) {
      concat = true;
    } else if (t.kind == TokenKind::identifier) {
      std::string last = t.text;
      while (i + 2 < toks.size() && toks[i + 1].is_punct('.') &&
             toks[i + 2].kind == TokenKind::identifier) {
        last = toks[i + 2].text;
        i += 2;
      }
      v.names.push_back(std::move(last));
      concat = false;
    } else {
      concat = false;
    }
  }
  return v;
}

// Parses `@Name(args)` starting at the '@'. Returns the index just past it.
std::size_t parse_annotation(std::span<const Token> toks, std::size_t at, Annotation& out) {
  std::size_t i = at + 1;
  out.line = toks[at].line;
  out.name = toks[i].text;
  ++i;
  while (i + 1 < toks.size() && toks[i].is_punct('.') &&
         toks[i + 1].kind == TokenKind::identifier) {
    out.name = toks[i + 1].text;
    i += 2;
  }
  if (i >= toks.size() || !toks[i].is_punct('('))
    return i;

  std::size_t depth = 0;
  std::size_t arg_start = i + 1;
  auto finish_arg = [&](std::size_t end) {
    auto arg = toks.subspan(arg_start, end - arg_start);
    if (arg.empty())
      return;
    if (arg.size() >= 2 && arg[0].kind == TokenKind::identifier && arg[1].is_punct('=') &&
        !(arg.size() >= 3 && arg[2].is_punct('=')))
      out.attrs[arg[0].text] = read_value(arg.subspan(2));
    else
      out.attrs["value"] = read_value(arg);
  };

  for (; i < toks.size(); ++i) {
    const auto& t = toks[i];
    if (t.is_punct('(') || t.is_punct('{') || t.is_punct('[')) {
      ++depth;
    } else if (t.is_punct(')') || t.is_punct('}') || t.is_punct(']')) {
      if (--depth == 0) {
        finish_arg(i);
        return i + 1;
      }
    } else if (t.is_punct(',') && depth == 1) {
      finish_arg(i);
      arg_start = i + 1;
    }
  }
  finish_arg(toks.size());
  return toks.size();
}

std::optional<HttpMethod> shorthand_method(std::string_view name) {
  if (name == "GetMapping") return HttpMethod::GET;
  if (name == "PostMapping") return HttpMethod::POST;
  if (name == "PutMapping") return HttpMethod::PUT;
  if (name == "DeleteMapping") return HttpMethod::DELETE;
  if (name == "PatchMapping") return HttpMethod::PATCH;
  return std::nullopt;
}

bool is_mapping(const Annotation& a) {
  return a.name == "RequestMapping" || shorthand_method(a.name).has_value();
}

bool is_declarative_client(const Annotation& a) { return a.name == "FeignClient"; }

std::vector<std::string> mapping_paths(const Annotation& a) {
  auto paths = a.strings({"value", "path"});
  if (paths.empty())
    paths.emplace_back();
  return paths;
}

std::vector<HttpMethod> mapping_methods(const Annotation& a) {
  if (auto m = shorthand_method(a.name))
    return {*m};
  std::vector<HttpMethod> out;
  if (const auto* v = a.attr("method")) {
    for (const auto& n : v->names) {
      for (auto m : {HttpMethod::GET, HttpMethod::POST, HttpMethod::PUT,
                     HttpMethod::DELETE, HttpMethod::PATCH})
        if (n == to_string(m))
          out.push_back(m);
    }
  }
  if (out.empty())
    out.push_back(HttpMethod::ANY);
  return out;
}

std::string join_paths(std::string_view prefix, std::string_view path) {
  std::string joined(prefix);
  joined.push_back('/');
  joined.append(path);
  return normalize_path(joined);
}

struct ClassFrame {
  std::vector<std::string> prefixes{""};
  std::optional<Annotation> client;
  std::size_t depth = 0;
};

/// A mapping annotation on a method of a declarative-client interface.
struct ClientMethod {
  Annotation client;
  std::string path;
  std::size_t line;
};

struct JavaFacts {
  std::vector<Endpoint> endpoints;
  std::vector<ClientMethod> client_methods;
  std::vector<Annotation> client_annotations;
  /// String literals outside annotations.
  std::vector<const Token*> literals;
};

JavaFacts scan_java(std::string_view service, std::span<const Token> toks,
                    const fs::path& file) {
  JavaFacts facts;
  std::vector<Annotation> pending;
  std::vector<ClassFrame> classes;
  std::optional<ClassFrame> opening;
  std::size_t depth = 0;

  auto flush_member = [&] {
    const ClassFrame* owner = classes.empty() ? nullptr : &classes.back();
    for (const auto& a : pending) {
      if (!is_mapping(a))
        continue;
      const std::vector<std::string> root{""};
      const auto& prefixes = owner ? owner->prefixes : root;
      for (const auto& prefix : prefixes) {
        for (const auto& p : mapping_paths(a)) {
          auto path = join_paths(prefix, p);
          if (owner && owner->client) {
            facts.client_methods.push_back({*owner->client, path, a.line});
            continue;
          }
          for (auto m : mapping_methods(a))
            facts.endpoints.push_back({std::string(service), m, path, file, a.line});
        }
      }
    }
    pending.clear();
  };

  auto begin_class = [&] {
    ClassFrame frame;
    for (const auto& a : pending) {
      if (a.name == "RequestMapping") {
        frame.prefixes.clear();
        for (const auto& p : mapping_paths(a))
          frame.prefixes.push_back(normalize_path(p));
      } else if (is_declarative_client(a)) {
        frame.client = a;
        facts.client_annotations.push_back(a);
      }
    }
    if (frame.client) {
      // The client's own `path` attribute prefixes every method route.
      auto base = frame.client->strings({"path"});
      if (!base.empty()) {
        std::vector<std::string> combined;
        for (const auto& b : base)
          for (const auto& p : frame.prefixes)
            combined.push_back(join_paths(b, p));
        frame.prefixes = std::move(combined);
      }
    }
    pending.clear();
    opening = std::move(frame);
  };

  for (std::size_t i = 0; i < toks.size();) {
    const auto& t = toks[i];
    bool after_dot = i > 0 && toks[i - 1].is_punct('.');

    if (t.is_punct('@') && i + 1 < toks.size() &&
        toks[i + 1].kind == TokenKind::identifier) {
      if (toks[i + 1].text == "interface") {
        begin_class();
        i += 2;
        continue;
      }
      Annotation a;
      i = parse_annotation(toks, i, a);
      pending.push_back(std::move(a));
      continue;
    }

    if (t.kind == TokenKind::identifier && !after_dot &&
        (t.text == "class" || t.text == "interface" || t.text == "enum" ||
         t.text == "record")) {
      begin_class();
    } else if (t.is_punct('{')) {
      ++depth;
      if (opening) {
        opening->depth = depth;
        classes.push_back(std::move(*opening));
        opening.reset();
      } else {
        flush_member();
      }
    } else if (t.is_punct('}')) {
      if (!classes.empty() && classes.back().depth == depth)
        classes.pop_back();
      if (depth > 0)
        --depth;
      pending.clear();
    } else if (t.is_punct(';')) {
      if (!opening)
        flush_member();
    } else if (t.is_punct('=') && !opening) {
      pending.clear();
    } else if (t.kind == TokenKind::string_literal) {
      facts.literals.push_back(&t);
    }
    ++i;
  }
  return facts;
}

/// Resolves a declarative client annotation to a known service.
const std::string* client_target(const Annotation& a, const ServiceIndex& idx) {
  for (const auto& n : a.strings({"name", "value", "serviceId"}))
    if (const auto* s = resolve_service(idx, n))
      return s;
  for (const auto& u : a.strings({"url"}))
    if (auto parsed = parse_service_url(u))
      if (const auto* s = resolve_service(idx, parsed->host))
        return s;
  return nullptr;
}

bool oversized(const fs::path& file, Warnings* warnings) {
  std::error_code ec;
  auto size = fs::file_size(file, ec);
  if (!ec && size <= kMaxScannedFileSize)
    return false;
  if (warnings)
    warnings->push_back(ec ? "skipping unreadable file " + file.string()
                           : "skipping oversized file " + file.string());
  return true;
}

bool read_source(const fs::path& file, std::string& text, Warnings* warnings) {
  if (oversized(file, warnings))
    return false;
  if (!read_file(file, text)) {
    if (warnings)
      warnings->push_back("skipping unreadable file " + file.string());
    return false;
  }
  return true;
}

WalkOptions source_walk() {
  WalkOptions opts;
  opts.skip_test_roots = true;
  return opts;
}

} // namespace

std::string normalize_path(std::string_view path) {
  path = trim(path);
  path = path.substr(0, path.find_first_of("?#"));
  std::string out;
  for (auto seg : segments(path)) {
    if (seg == ".")
      continue;
    out.push_back('/');
    out.append(canonical_segment(seg));
  }
  return out.empty() ? "/" : out;
}

bool paths_overlap(std::string_view call_path, std::string_view endpoint_path) {
  auto a = segments(call_path);
  auto b = segments(endpoint_path);
  if (a.empty() || b.empty())
    return a.empty() && b.empty();
  auto n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i)
    if (a[i] != b[i] && a[i] != "{*}" && b[i] != "{*}")
      return false;
  return true;
}

std::optional<ParsedUrl> parse_service_url(std::string_view text) {
  text = trim(text);
  auto sep = text.find("://");
  if (sep == std::string_view::npos)
    return std::nullopt;
  auto scheme = lower(text.substr(0, sep));
  if (scheme != "http" && scheme != "https" && scheme != "lb")
    return std::nullopt;
  for (char c : text)
    if (std::isspace(static_cast<unsigned char>(c)) || c == '"' || c == '\'')
      return std::nullopt;

  auto rest = text.substr(sep + 3);
  auto auth_end = rest.find_first_of("/?#");
  auto authority = rest.substr(0, auth_end);
  if (auto at = authority.rfind('@'); at != std::string_view::npos)
    authority.remove_prefix(at + 1);

  ParsedUrl url;
  url.scheme = scheme;
  auto colon = authority.find(':');
  url.host = std::string(authority.substr(0, colon));
  if (url.host.empty())
    return std::nullopt;
  for (char c : url.host)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.'))
      return std::nullopt;
  if (colon != std::string_view::npos) {
    auto port = authority.substr(colon + 1);
    if (port.empty() || port.size() > 5 ||
        !std::all_of(port.begin(), port.end(),
                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
      return std::nullopt;
    url.port = static_cast<unsigned>(std::stoul(std::string(port)));
  }
  if (auth_end != std::string_view::npos) {
    auto path = rest.substr(auth_end);
    path = path.substr(0, path.find_first_of("?#"));
    if (!path.empty() && path != "/")
      url.path = normalize_path(path);
  }
  return url;
}

std::vector<Endpoint> endpoints_in_source(std::string_view service,
                                          std::string_view source,
                                          const fs::path& file) {
  auto toks = tokenize_java(source);
  return scan_java(service, toks, file).endpoints;
}

std::vector<CallSite> call_sites_in_source(std::string_view caller,
                                           std::string_view source,
                                           const fs::path& file,
                                           std::span<const std::string> known_services) {
  auto idx = index_services(known_services);
  auto toks = tokenize_java(source);
  auto facts = scan_java(caller, toks, file);

  struct Located {
    std::size_t line;
    CallSite site;
  };
  std::vector<Located> found;

  for (const auto& a : facts.client_annotations)
    if (const auto* target = client_target(a, idx)) {
      std::optional<std::string> path;
      if (auto p = a.strings({"path"}); !p.empty())
        path = normalize_path(p.front());
      found.push_back({a.line,
                       {std::string(caller), *target, path, file, a.line,
                        CallEvidence::declarative_client}});
    }
  for (const auto& m : facts.client_methods)
    if (const auto* target = client_target(m.client, idx))
      found.push_back({m.line,
                       {std::string(caller), *target, m.path, file, m.line,
                        CallEvidence::declarative_client}});
  for (const auto* lit : facts.literals)
    if (auto url = parse_service_url(lit->text))
      if (const auto* target = resolve_service(idx, url->host))
        found.push_back({lit->line,
                         {std::string(caller), *target, url->path, file, lit->line,
                          CallEvidence::url_literal}});

  std::stable_sort(found.begin(), found.end(), [](const Located& a, const Located& b) {
    return a.line < b.line;
  });
  std::vector<CallSite> out;
  out.reserve(found.size());
  for (auto& f : found)
    out.push_back(std::move(f.site));
  return out;
}

std::vector<CallSite> call_sites_in_config(std::string_view caller,
                                           std::string_view text,
                                           const fs::path& file,
                                           std::span<const std::string> known_services) {
  static const std::regex url_re(R"((?:https?|lb)://[A-Za-z0-9._-]+(?::[0-9]+)?(?:/[^\s"'`,;(){}<>\[\]]*)?)",
                                 std::regex::icase);
  auto idx = index_services(known_services);
  std::vector<CallSite> out;
  std::size_t line = 1;
  std::size_t counted = 0;
  std::string str(text);
  for (auto it = std::sregex_iterator(str.begin(), str.end(), url_re);
       it != std::sregex_iterator(); ++it) {
    auto pos = static_cast<std::size_t>(it->position());
    line += static_cast<std::size_t>(std::count(str.begin() + counted, str.begin() + pos, '\n'));
    counted = pos;
    auto url = parse_service_url(it->str());
    if (!url)
      continue;
    if (const auto* target = resolve_service(idx, url->host))
      out.push_back({std::string(caller), *target, url->path, file, line,
                     CallEvidence::config_property});
  }
  return out;
}

std::vector<Endpoint> extract_endpoints(std::string_view service,
                                        const fs::path& source_dir,
                                        Warnings* warnings) {
  std::vector<Endpoint> out;
  auto files = list_files(
      source_dir, [](const fs::path& p) { return has_extension(p, {".java"}); },
      source_walk(), warnings);
  std::string text;
  for (const auto& file : files) {
    if (!read_source(file, text, warnings))
      continue;
    auto found = endpoints_in_source(service, text, file);
    out.insert(out.end(), std::make_move_iterator(found.begin()),
               std::make_move_iterator(found.end()));
  }
  return out;
}

std::vector<CallSite> extract_call_sites(std::string_view caller,
                                         const fs::path& source_dir,
                                         std::span<const std::string> known_services,
                                         Warnings* warnings) {
  std::vector<CallSite> out;
  auto files = list_files(
      source_dir,
      [](const fs::path& p) {
        return has_extension(p, {".java", ".properties", ".yml", ".yaml"});
      },
      source_walk(), warnings);
  std::string text;
  for (const auto& file : files) {
    if (!read_source(file, text, warnings))
      continue;
    auto found = has_extension(file, {".java"})
                     ? call_sites_in_source(caller, text, file, known_services)
                     : call_sites_in_config(caller, text, file, known_services);
    out.insert(out.end(), std::make_move_iterator(found.begin()),
               std::make_move_iterator(found.end()));
  }
  return out;
}

std::vector<DependencyEdge> api_dependencies(std::span<const CallSite> call_sites,
                                             std::span<const Endpoint> endpoints) {
  std::vector<DependencyEdge> edges;
  std::map<std::pair<std::string, std::string>, std::size_t> seen;
  for (const auto& site : call_sites) {
    if (site.caller == site.target_host || site.target_host.empty())
      continue;
    auto [it, inserted] =
        seen.try_emplace({site.caller, site.target_host}, edges.size());
    if (inserted)
      edges.push_back({site.caller, site.target_host, EdgeKind::api, false});
    auto& edge = edges[it->second];
    if (edge.endpoint_matched || !site.target_path)
      continue;
    edge.endpoint_matched = std::any_of(
        endpoints.begin(), endpoints.end(), [&](const Endpoint& e) {
          return e.service == site.target_host && paths_overlap(*site.target_path, e.path);
        });
  }
  return edges;
}

} // namespace microdep
