#include "microdep/corpus.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include <sys/wait.h>

#include <json.hpp>

namespace microdep {

AnalysisResult analyze_project(const fs::path& project_root, const std::string& name,
                               const AnalyzeOptions& options) {
  AnalysisResult out;
  auto& warnings = out.warnings;

  auto compose_path = options.compose_file ? *options.compose_file
                                           : locate_compose_file(project_root);
  auto model = load_compose(compose_path, options.env, &warnings);
  auto config_edges = config_dependencies(model, &warnings);
  auto sources = resolve_service_sources(model, project_root, &warnings);
  auto known = model.service_names();

  for (const auto& svc : model.services) {
    const auto& dir = sources.at(svc.name);
    if (!dir)
      continue;
    auto endpoints = extract_endpoints(svc.name, *dir, &warnings);
    auto calls = extract_call_sites(svc.name, *dir, known, &warnings);
    out.endpoints.insert(out.endpoints.end(), endpoints.begin(), endpoints.end());
    out.call_sites.insert(out.call_sites.end(), calls.begin(), calls.end());
  }

  auto api_edges = api_dependencies(out.call_sites, out.endpoints);
  out.graph = build_graph(name, model, config_edges, api_edges);
  out.metrics = graph_metrics(out.graph);
  out.sloc = count_project(project_root, sources, &warnings);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::string shell_quote(std::string_view arg) {
  std::string out = "'";
  for (char c : arg) {
    if (c == '\'')
      out += "'\\''";
    else
      out.push_back(c);
  }
  out.push_back('\'');
  return out;
}

/// Runs git with `args`, returning combined output. Throws FetchError on a
/// non-zero exit status.
std::string run_git(const std::vector<std::string>& args) {
  std::string cmd = "GIT_TERMINAL_PROMPT=0 GIT_ASKPASS=true git -c advice.detachedHead=false";
  for (const auto& a : args)
    cmd += " " + shell_quote(a);
  cmd += " 2>&1";

  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (pipe == nullptr)
    throw FetchError("cannot run git");
  std::string output;
  char buf[4096];
  while (auto n = std::fread(buf, 1, sizeof buf, pipe))
    output.append(buf, n);
  int status = ::pclose(pipe);
  if (status != 0) {
    int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    while (!output.empty() && (output.back() == '\n' || output.back() == '\r'))
      output.pop_back();
    throw FetchError("git " + (args.empty() ? std::string() : args.front()) +
                     " failed (exit " + std::to_string(code) + "): " + output);
  }
  return output;
}

std::string cache_entry_name(std::string_view project) {
  std::string out;
  for (char c : project) {
    bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    out.push_back(ok ? c : '_');
  }
  return out;
}

bool looks_remote(std::string_view url) {
  return url.find("://") != std::string_view::npos || url.starts_with("git@");
}

} // namespace

void GitCli::clone(const std::string& url, const fs::path& dest) {
  run_git({"clone", "--quiet", "--", url, dest.string()});
}

void GitCli::fetch(const fs::path& repo) {
  run_git({"-C", repo.string(), "fetch", "--quiet", "--tags", "origin"});
}

void GitCli::checkout(const fs::path& repo, const std::string& rev) {
  run_git({"-C", repo.string(), "checkout", "--quiet", rev});
}

std::string GitCli::head(const fs::path& repo) {
  auto out = run_git({"-C", repo.string(), "rev-parse", "HEAD"});
  while (!out.empty() && std::isspace(static_cast<unsigned char>(out.back())))
    out.pop_back();
  return out;
}

fs::path default_cache_dir() {
  if (const char* env = std::getenv("MICRODEP_CACHE"); env && *env)
    return env;
  if (const char* xdg = std::getenv("XDG_CACHE_HOME"); xdg && *xdg)
    return fs::path(xdg) / "microdep";
  if (const char* home = std::getenv("HOME"); home && *home)
    return fs::path(home) / ".cache" / "microdep";
  return fs::current_path() / ".microdep-cache";
}

fs::path fetch_project(const ProjectRecord& record, const fs::path& cache_dir, Vcs& vcs,
                       const fs::path& base_dir) {
  std::error_code ec;
  if (record.repo_url.empty())
    throw FetchError(record.name + ": no repository URL");

  std::string clone_url = record.repo_url;
  if (!looks_remote(record.repo_url) || record.repo_url.starts_with("file://")) {
    fs::path local = record.repo_url.starts_with("file://")
                         ? fs::path(record.repo_url.substr(7))
                         : fs::path(record.repo_url);
    if (local.is_relative())
      local = base_dir / local;
    if (!record.pinned_rev) {
      if (!fs::is_directory(local, ec))
        throw FetchError(record.name + ": local path " + local.string() + " does not exist");
      return local.lexically_normal();
    }
    clone_url = local.lexically_normal().string();
  }

  auto dest = cache_dir / cache_entry_name(record.name);
  if (fs::exists(dest, ec)) {
    if (!fs::exists(dest / ".git", ec))
      throw FetchError(record.name + ": cache entry " + dest.string() +
                       " exists but is not a repository");
  } else {
    fs::create_directories(cache_dir, ec);
    if (ec)
      throw FetchError("cannot create cache directory " + cache_dir.string() + ": " +
                       ec.message());
    vcs.clone(clone_url, dest);
  }

  if (record.pinned_rev) {
    const auto& rev = *record.pinned_rev;
    if (!vcs.head(dest).starts_with(rev)) {
      try {
        vcs.checkout(dest, rev);
      } catch (const FetchError&) {
        vcs.fetch(dest);
        vcs.checkout(dest, rev);
      }
      if (!vcs.head(dest).starts_with(rev))
        throw FetchError(record.name + ": HEAD does not match pinned revision " + rev);
    }
  }
  return dest;
}

// ---------------------------------------------------------------------------

std::string_view to_string(ProjectStatus status) {
  switch (status) {
  case ProjectStatus::analyzed: return "analyzed";
  case ProjectStatus::unavailable: return "unavailable";
  case ProjectStatus::unanalyzable: return "unanalyzable";
  }
  return "unavailable";
}

ComparisonReport compare(const std::vector<ProjectRecord>& records,
                         const std::map<std::string, ProjectOutcome>& results,
                         const Tolerances& tolerances) {
  ComparisonReport report;
  report.tolerances = tolerances;

  for (const auto& rec : records) {
    ComparisonRow row;
    row.name = rec.name;
    row.expected_services = rec.expected_services;
    row.expected_deps = rec.expected_deps;
    row.expected_kloc = rec.expected_kloc;
    row.kloc_exempt = rec.kloc_exempt;

    auto it = results.find(rec.name);
    if (it == results.end() || it->second.status != ProjectStatus::analyzed ||
        !it->second.result) {
      row.skipped = true;
      if (it == results.end())
        row.skip_reason = "not run";
      else
        row.skip_reason = std::string(to_string(it->second.status)) +
                          (it->second.error.empty() ? "" : ": " + it->second.error);
      ++report.skipped;
      report.rows.push_back(std::move(row));
      continue;
    }

    const auto& r = *it->second.result;
    row.measured_services = r.metrics.service_count;
    row.measured_deps = r.metrics.dependency_count;
    row.measured_kloc = r.sloc.kloc_value();
    row.warnings = r.warnings;

    auto services_delta = static_cast<long>(row.measured_services) -
                          static_cast<long>(row.expected_services);
    row.services_pass = tolerances.services_exact ? services_delta == 0
                                                  : std::labs(services_delta) <= 1;

    row.deps_delta = static_cast<long>(row.measured_deps) - static_cast<long>(row.expected_deps);
    row.deps_pass = static_cast<std::size_t>(std::labs(row.deps_delta)) <= tolerances.deps_abs;

    row.kloc_delta = row.measured_kloc - row.expected_kloc;
    if (row.expected_kloc > 0.0)
      row.kloc_rel_delta = std::fabs(row.kloc_delta) / row.expected_kloc;
    else
      row.kloc_rel_delta = row.measured_kloc == 0.0 ? 0.0 : INFINITY;
    // Rounding slack keeps a delta of exactly the tolerance on the pass side.
    row.kloc_pass = row.kloc_exempt || row.kloc_rel_delta <= tolerances.kloc_rel + 1e-12;

    ++report.compared;
    if (row.pass())
      ++report.passed;
    report.rows.push_back(std::move(row));
  }
  return report;
}

namespace {

using ojson = nlohmann::ordered_json;

double finite_or(double v, double fallback) { return std::isfinite(v) ? v : fallback; }

} // namespace

std::string report_to_json(const ComparisonReport& report) {
  ojson doc;
  doc["tolerances"] = {{"services_exact", report.tolerances.services_exact},
                       {"deps_abs", report.tolerances.deps_abs},
                       {"kloc_rel", report.tolerances.kloc_rel}};
  doc["compared"] = report.compared;
  doc["passed"] = report.passed;
  doc["skipped"] = report.skipped;
  auto rows = ojson::array();
  for (const auto& r : report.rows) {
    ojson row;
    row["name"] = r.name;
    row["status"] = r.skipped ? "skipped" : (r.pass() ? "pass" : "fail");
    row["skip_reason"] = r.skip_reason;
    row["services"] = {{"measured", r.measured_services},
                       {"expected", r.expected_services},
                       {"pass", r.services_pass}};
    row["deps"] = {{"measured", r.measured_deps},
                   {"expected", r.expected_deps},
                   {"delta", r.deps_delta},
                   {"pass", r.deps_pass}};
    row["kloc"] = {{"measured", r.measured_kloc},
                   {"expected", r.expected_kloc},
                   {"delta", r.kloc_delta},
                   {"rel_delta", finite_or(r.kloc_rel_delta, -1.0)},
                   {"exempt", r.kloc_exempt},
                   {"pass", r.kloc_pass}};
    row["warnings"] = r.warnings;
    rows.push_back(std::move(row));
  }
  doc["rows"] = std::move(rows);
  return doc.dump(2, ' ', false, ojson::error_handler_t::replace) + "\n";
}

ComparisonReport report_from_json(std::string_view text) {
  ComparisonReport report;
  try {
    auto doc = nlohmann::json::parse(text);
    const auto& tol = doc.at("tolerances");
    report.tolerances.services_exact = tol.at("services_exact").get<bool>();
    report.tolerances.deps_abs = tol.at("deps_abs").get<std::size_t>();
    report.tolerances.kloc_rel = tol.at("kloc_rel").get<double>();
    report.compared = doc.at("compared").get<std::size_t>();
    report.passed = doc.at("passed").get<std::size_t>();
    report.skipped = doc.at("skipped").get<std::size_t>();
    for (const auto& j : doc.at("rows")) {
      ComparisonRow r;
      r.name = j.at("name").get<std::string>();
      r.skipped = j.at("status").get<std::string>() == "skipped";
      r.skip_reason = j.at("skip_reason").get<std::string>();
      const auto& s = j.at("services");
      r.measured_services = s.at("measured").get<std::size_t>();
      r.expected_services = s.at("expected").get<std::size_t>();
      r.services_pass = s.at("pass").get<bool>();
      const auto& d = j.at("deps");
      r.measured_deps = d.at("measured").get<std::size_t>();
      r.expected_deps = d.at("expected").get<std::size_t>();
      r.deps_delta = d.at("delta").get<long>();
      r.deps_pass = d.at("pass").get<bool>();
      const auto& k = j.at("kloc");
      r.measured_kloc = k.at("measured").get<double>();
      r.expected_kloc = k.at("expected").get<double>();
      r.kloc_delta = k.at("delta").get<double>();
      r.kloc_rel_delta = k.at("rel_delta").get<double>();
      if (r.kloc_rel_delta < 0.0)
        r.kloc_rel_delta = INFINITY;
      r.kloc_exempt = k.at("exempt").get<bool>();
      r.kloc_pass = k.at("pass").get<bool>();
      r.warnings = j.at("warnings").get<Warnings>();
      report.rows.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed report: ") + e.what());
  }
  return report;
}

std::string render_report_table(const ComparisonReport& report) {
  std::size_t name_width = 7;
  for (const auto& r : report.rows)
    name_width = std::max(name_width, r.name.size());

  std::ostringstream out;
  auto mark = [](bool ok) { return ok ? "ok" : "FAIL"; };
  out << std::left << std::setw(static_cast<int>(name_width)) << "project"
      << "  status   services     deps         kloc\n";
  for (const auto& r : report.rows) {
    out << std::left << std::setw(static_cast<int>(name_width)) << r.name << "  ";
    if (r.skipped) {
      out << "skipped  " << r.skip_reason << "\n";
      continue;
    }
    std::ostringstream svc, dep, kloc;
    svc << r.measured_services << "/" << r.expected_services << " " << mark(r.services_pass);
    dep << r.measured_deps << "/" << r.expected_deps << " " << mark(r.deps_pass);
    kloc << std::fixed << std::setprecision(3) << r.measured_kloc << "/" << r.expected_kloc
         << " " << (r.kloc_exempt ? "exempt" : mark(r.kloc_pass));
    out << std::setw(9) << (r.pass() ? "pass" : "fail") << std::setw(13) << svc.str()
        << std::setw(13) << dep.str() << kloc.str() << "\n";
  }
  out << "\ncompared " << report.compared << ", passed " << report.passed << ", skipped "
      << report.skipped << " (tolerances: services "
      << (report.tolerances.services_exact ? "exact" : "+-1") << ", deps +-"
      << report.tolerances.deps_abs << ", kloc +-" << report.tolerances.kloc_rel * 100.0
      << "%)\n";
  return out.str();
}

CorpusRun run_corpus(const std::vector<ProjectRecord>& records, const CorpusOptions& options,
                     Vcs& vcs) {
  std::vector<ProjectOutcome> outcomes(records.size());
  std::atomic<std::size_t> next{0};
  // Serialized: Vcs implementations are not required to be thread-safe.
  std::mutex vcs_mutex;

  auto work = [&] {
    for (auto i = next++; i < records.size(); i = next++) {
      const auto& rec = records[i];
      auto& outcome = outcomes[i];
      fs::path root;
      try {
        std::lock_guard lock(vcs_mutex);
        root = fetch_project(rec, options.cache_dir, vcs, options.base_dir);
      } catch (const std::exception& e) {
        outcome.status = ProjectStatus::unavailable;
        outcome.error = e.what();
        continue;
      }
      try {
        outcome.result = analyze_project(root, rec.name, options.analyze);
        outcome.status = ProjectStatus::analyzed;
      } catch (const std::exception& e) {
        outcome.status = ProjectStatus::unanalyzable;
        outcome.error = e.what();
      }
    }
  };

  auto workers = std::clamp<std::size_t>(options.jobs, 1, std::max<std::size_t>(1, records.size()));
  std::vector<std::jthread> pool;
  for (std::size_t w = 1; w < workers; ++w)
    pool.emplace_back(work);
  work();
  pool.clear();

  CorpusRun run;
  for (std::size_t i = 0; i < records.size(); ++i)
    run.outcomes.emplace(records[i].name, std::move(outcomes[i]));
  run.report = compare(records, run.outcomes, options.tolerances);
  return run;
}

} // namespace microdep
