#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "microdep/code_analyzer.hpp"
#include "microdep/compose.hpp"
#include "microdep/depgraph.hpp"
#include "microdep/error.hpp"
#include "microdep/manifest.hpp"
#include "microdep/sloc.hpp"

namespace microdep {

namespace fs = std::filesystem;

struct AnalyzeOptions {
  /// Overrides compose file discovery.
  std::optional<fs::path> compose_file;
  Environment env;
};

struct AnalysisResult {
  DependencyGraph graph;
  GraphMetrics metrics;
  SlocReport sloc;
  std::vector<Endpoint> endpoints;
  std::vector<CallSite> call_sites;
  Warnings warnings;
};

/// Full pipeline over one checked-out project: compose discovery and
/// parsing, per-service code scanning, graph merge, metrics and line counts.
/// NotFound, ParseError and EmptyModel propagate to the caller.
AnalysisResult analyze_project(const fs::path& project_root, const std::string& name,
                               const AnalyzeOptions& options = {});

/// Version-control operations used by fetch_project.
class Vcs {
public:
  virtual ~Vcs() = default;
  virtual void clone(const std::string& url, const fs::path& dest) = 0;
  /// Updates remote refs of an existing clone.
  virtual void fetch(const fs::path& repo) = 0;
  virtual void checkout(const fs::path& repo, const std::string& rev) = 0;
  /// Full revision id of the checked-out HEAD.
  virtual std::string head(const fs::path& repo) = 0;
};

/// Vcs backed by the `git` executable. Failures throw FetchError.
class GitCli final : public Vcs {
public:
  void clone(const std::string& url, const fs::path& dest) override;
  void fetch(const fs::path& repo) override;
  void checkout(const fs::path& repo, const std::string& rev) override;
  std::string head(const fs::path& repo) override;
};

/// Clone cache: MICRODEP_CACHE if set, otherwise a per-user cache directory.
fs::path default_cache_dir();

/// Returns a working tree for `record`. A repo_url naming an existing local
/// directory (relative paths resolve against `base_dir`) is used in place
/// when no revision is pinned. Otherwise the repository is cloned into
/// `cache_dir` unless already there, and the pinned revision checked out.
/// Throws FetchError.
fs::path fetch_project(const ProjectRecord& record, const fs::path& cache_dir, Vcs& vcs,
                       const fs::path& base_dir = fs::current_path());

enum class ProjectStatus { analyzed, unavailable, unanalyzable };

std::string_view to_string(ProjectStatus status);

struct ProjectOutcome {
  ProjectStatus status = ProjectStatus::unavailable;
  std::optional<AnalysisResult> result;
  std::string error;
};

struct Tolerances {
  bool services_exact = true;
  std::size_t deps_abs = 2;
  double kloc_rel = 0.10;

  bool operator==(const Tolerances&) const = default;
};

struct ComparisonRow {
  std::string name;
  bool skipped = false;
  std::string skip_reason;

  std::size_t measured_services = 0;
  std::size_t expected_services = 0;
  bool services_pass = false;

  std::size_t measured_deps = 0;
  std::size_t expected_deps = 0;
  long deps_delta = 0;
  bool deps_pass = false;

  double measured_kloc = 0.0;
  double expected_kloc = 0.0;
  double kloc_delta = 0.0;
  double kloc_rel_delta = 0.0;
  bool kloc_exempt = false;
  bool kloc_pass = false;

  Warnings warnings;

  bool pass() const { return !skipped && services_pass && deps_pass && kloc_pass; }

  bool operator==(const ComparisonRow&) const = default;
};

struct ComparisonReport {
  Tolerances tolerances;
  std::vector<ComparisonRow> rows;
  std::size_t compared = 0;
  std::size_t passed = 0;
  std::size_t skipped = 0;

  bool operator==(const ComparisonReport&) const = default;
};

/// Measured-versus-expected rows in manifest order. Projects without an
/// analyzed outcome are skipped and excluded from the aggregate counts.
ComparisonReport compare(const std::vector<ProjectRecord>& records,
                         const std::map<std::string, ProjectOutcome>& results,
                         const Tolerances& tolerances = {});

std::string report_to_json(const ComparisonReport& report);
/// Throws Error on malformed input.
ComparisonReport report_from_json(std::string_view text);
/// Fixed-width table for terminals.
std::string render_report_table(const ComparisonReport& report);

struct CorpusOptions {
  fs::path cache_dir;
  fs::path base_dir = fs::current_path();
  std::size_t jobs = 4;
  Tolerances tolerances;
  AnalyzeOptions analyze;
};

struct CorpusRun {
  std::map<std::string, ProjectOutcome> outcomes;
  ComparisonReport report;
};

/// Fetches and analyzes every record with at most `options.jobs` workers.
/// A failing project is recorded, never rethrown.
CorpusRun run_corpus(const std::vector<ProjectRecord>& records, const CorpusOptions& options,
                     Vcs& vcs);

} // namespace microdep
