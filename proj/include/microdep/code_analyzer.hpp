#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "microdep/depgraph.hpp"
#include "microdep/error.hpp"

namespace microdep {

namespace fs = std::filesystem;

enum class HttpMethod { GET, POST, PUT, DELETE, PATCH, ANY };

std::string_view to_string(HttpMethod method);

/// A REST route exposed by a service.
struct Endpoint {
  std::string service;
  HttpMethod http_method = HttpMethod::ANY;
  /// Normalized template, see normalize_path().
  std::string path;
  fs::path file;
  std::size_t line = 0;

  bool operator==(const Endpoint&) const = default;
};

enum class CallEvidence { url_literal, declarative_client, config_property };

std::string_view to_string(CallEvidence evidence);

/// An outgoing call from `caller` to the service named `target_host`.
struct CallSite {
  std::string caller;
  /// Canonical (compose) spelling of the target service name.
  std::string target_host;
  std::optional<std::string> target_path;
  fs::path file;
  std::size_t line = 0;
  CallEvidence evidence = CallEvidence::url_literal;

  bool operator==(const CallSite&) const = default;
};

/// Canonical form of a route template: leading slash, no empty or `.`
/// segments, no trailing slash, every `{...}` group replaced by `{*}`, query
/// and fragment removed. The empty path normalizes to "/".
std::string normalize_path(std::string_view path);

/// True when one normalized path is a segment-wise prefix of the other,
/// `{*}` matching any single segment. "/" only matches "/".
bool paths_overlap(std::string_view call_path, std::string_view endpoint_path);

struct ParsedUrl {
  std::string scheme;
  std::string host;
  std::optional<unsigned> port;
  /// Normalized path; absent when the URL has none.
  std::optional<std::string> path;
};

/// Parses an absolute http, https or lb (client-side load balanced) URL.
/// The whole input must be the URL; surrounding whitespace is ignored.
std::optional<ParsedUrl> parse_service_url(std::string_view text);

/// Endpoints declared in one Java compilation unit.
std::vector<Endpoint> endpoints_in_source(std::string_view service,
                                          std::string_view source,
                                          const fs::path& file);

/// Call sites in one Java compilation unit.
std::vector<CallSite> call_sites_in_source(std::string_view caller,
                                           std::string_view source,
                                           const fs::path& file,
                                           std::span<const std::string> known_services);

/// Call sites in a properties or YAML configuration file.
std::vector<CallSite> call_sites_in_config(std::string_view caller,
                                           std::string_view text,
                                           const fs::path& file,
                                           std::span<const std::string> known_services);

/// Files larger than this are skipped as generated code.
inline constexpr std::uintmax_t kMaxScannedFileSize = 1024 * 1024;

std::vector<Endpoint> extract_endpoints(std::string_view service,
                                        const fs::path& source_dir,
                                        Warnings* warnings = nullptr);

std::vector<CallSite> extract_call_sites(std::string_view caller,
                                         const fs::path& source_dir,
                                         std::span<const std::string> known_services,
                                         Warnings* warnings = nullptr);

/// One api edge per distinct (caller, target) pair in first-occurrence
/// order, self-calls dropped. `endpoint_matched` is set when some call path
/// overlaps an endpoint of the target service.
std::vector<DependencyEdge> api_dependencies(std::span<const CallSite> call_sites,
                                             std::span<const Endpoint> endpoints);

} // namespace microdep
