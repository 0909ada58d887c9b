#include "microdep/cli.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "microdep/corpus.hpp"
#include "microdep/emit.hpp"
#include "microdep/fs_walk.hpp"

namespace microdep::cli {

namespace {

struct Context {
  fs::path working_dir;
  std::ostream& out;
  std::ostream& err;
  bool quiet = false;

  fs::path resolve(const fs::path& p) const {
    return p.is_absolute() ? p : (working_dir / p).lexically_normal();
  }

  void warn(const Warnings& warnings) const {
    if (quiet)
      return;
    for (const auto& w : warnings)
      err << "warning: " << w << "\n";
  }
};

void write_file(const fs::path& path, std::string_view data) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!f)
    throw Error("cannot write " + path.string());
}

std::string file_stem(std::string_view name) {
  std::string out(name);
  std::replace(out.begin(), out.end(), '/', '_');
  std::replace(out.begin(), out.end(), '\\', '_');
  return out.empty() ? "graph" : out;
}

// --- analyze ---------------------------------------------------------------

struct AnalyzeArgs {
  std::string path;
  std::string name;
  std::vector<std::string> formats;
  std::string out_dir;
  std::string compose_file;
  std::vector<std::string> env;
};

int cmd_analyze(const AnalyzeArgs& a, const Context& ctx) {
  std::vector<Format> formats;
  for (const auto& f : a.formats) {
    auto parsed = format_from_string(f);
    if (!parsed) {
      ctx.err << "error: unknown format '" << f << "'\n";
      return kExitUsage;
    }
    if (std::find(formats.begin(), formats.end(), *parsed) == formats.end())
      formats.push_back(*parsed);
  }
  if (formats.empty())
    formats = {Format::graphml, Format::svg};

  AnalyzeOptions opts;
  if (!a.compose_file.empty())
    opts.compose_file = ctx.resolve(a.compose_file);
  for (const auto& kv : a.env) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) {
      ctx.err << "error: --env expects KEY=VALUE, got '" << kv << "'\n";
      return kExitUsage;
    }
    opts.env[kv.substr(0, eq)] = kv.substr(eq + 1);
  }

  auto root = ctx.resolve(a.path);
  auto result = analyze_project(root, a.name, opts);
  ctx.warn(result.warnings);

  auto out_dir = a.out_dir.empty() ? ctx.resolve(fs::path("out") / file_stem(a.name))
                                   : ctx.resolve(a.out_dir);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec)
    throw Error("cannot create " + out_dir.string() + ": " + ec.message());

  for (auto f : formats) {
    auto path = out_dir / (file_stem(a.name) + std::string(file_extension(f)));
    write_file(path, render(result.graph, f, result.sloc, result.warnings));
    if (!ctx.quiet)
      ctx.err << "wrote " << path.string() << "\n";
  }
  ctx.out << a.name << ": " << result.metrics.service_count << " services, "
          << result.metrics.dependency_count << " dependencies, " << result.sloc.kloc
          << " KLOC\n";
  return kExitOk;
}

// --- sloc ------------------------------------------------------------------

int cmd_sloc(const std::string& path, bool json, const Context& ctx) {
  auto root = ctx.resolve(path);
  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    ctx.err << "error: not a directory: " << root.string() << "\n";
    return kExitAnalysisError;
  }

  Warnings warnings;
  std::map<std::string, std::optional<fs::path>> dirs;
  try {
    auto model = load_compose(locate_compose_file(root), {}, &warnings);
    dirs = resolve_service_sources(model, root, &warnings);
  } catch (const Error& e) {
    warnings.push_back(std::string("per-service attribution unavailable: ") + e.what());
  }
  auto report = count_project(root, dirs, &warnings);
  ctx.warn(warnings);

  if (json) {
    nlohmann::ordered_json doc;
    doc["per_file"] = report.per_file;
    doc["per_service"] = report.per_service;
    doc["total"] = report.total;
    doc["kloc"] = report.kloc_value();
    ctx.out << doc.dump(2, ' ', false, nlohmann::json::error_handler_t::replace) << "\n";
    return kExitOk;
  }
  for (const auto& [service, n] : report.per_service)
    ctx.out << service << "\t" << n << "\n";
  ctx.out << "total\t" << report.total << "\n"
          << "kloc\t" << report.kloc << "\n";
  return kExitOk;
}

// --- corpus ----------------------------------------------------------------

struct CorpusArgs {
  std::string manifest;
  std::string cache;
  std::string out_dir;
  std::size_t jobs = 4;
  bool json = false;
};

int cmd_corpus_run(const CorpusArgs& a, const Context& ctx, Vcs& vcs) {
  std::optional<fs::path> manifest_path;
  if (!a.manifest.empty())
    manifest_path = ctx.resolve(a.manifest);
  auto records = load_manifest(manifest_path);

  CorpusOptions opts;
  opts.cache_dir = a.cache.empty() ? default_cache_dir() : fs::path(a.cache);
  opts.cache_dir = ctx.resolve(opts.cache_dir);
  opts.base_dir = manifest_path ? manifest_path->parent_path() : ctx.working_dir;
  opts.jobs = a.jobs;

  auto run = run_corpus(records, opts, vcs);
  for (const auto& rec : records) {
    const auto& o = run.outcomes.at(rec.name);
    if (o.status != ProjectStatus::analyzed)
      ctx.err << "skipped " << rec.name << ": " << o.error << "\n";
    else if (!ctx.quiet)
      for (const auto& w : o.result->warnings)
        ctx.err << "warning: " << rec.name << ": " << w << "\n";
  }

  auto json = report_to_json(run.report);
  if (!a.out_dir.empty()) {
    auto dir = ctx.resolve(a.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    write_file(dir / "corpus-report.json", json);
  }
  ctx.out << (a.json ? json : render_report_table(run.report));

  bool complete = run.report.skipped == 0 && run.report.passed == run.report.compared;
  return complete ? kExitOk : kExitPartialCorpus;
}

int cmd_corpus_report(const std::string& path, bool json, const Context& ctx) {
  std::string text;
  if (!read_file(ctx.resolve(path), text)) {
    ctx.err << "error: cannot read " << path << "\n";
    return kExitAnalysisError;
  }
  auto report = report_from_json(text);
  ctx.out << (json ? report_to_json(report) : render_report_table(report));
  return kExitOk;
}

} // namespace

int run(std::span<const std::string> args, const fs::path& working_dir, std::ostream& out,
        std::ostream& err, Vcs* vcs) {
  CLI::App app{"Extract service dependency graphs from microservice repositories", "microdep"};
  app.require_subcommand(1, 1);

  bool quiet = false;
  bool json = false;
  app.add_flag("--quiet", quiet, "Suppress warnings");

  AnalyzeArgs analyze;
  auto* analyze_cmd = app.add_subcommand(
      "analyze", "Build the dependency graph of a project and write it out");
  analyze_cmd->add_option("path", analyze.path, "Project root")->required();
  analyze_cmd->add_option("name", analyze.name, "Project name")->required();
  analyze_cmd->add_option("--format", analyze.formats,
                          "graphml, dot, svg, cypher or json (repeatable; default graphml+svg)")
      ->expected(1)
      ->take_all();
  analyze_cmd->add_option("--out", analyze.out_dir, "Output directory (default ./out/<name>)");
  analyze_cmd->add_option("--compose-file", analyze.compose_file, "Compose file to read");
  analyze_cmd->add_option("--env", analyze.env, "Compose interpolation variable KEY=VALUE")
      ->expected(1)
      ->take_all();
  analyze_cmd->add_flag("--quiet", quiet, "Suppress warnings");

  std::string sloc_path;
  auto* sloc_cmd = app.add_subcommand("sloc", "Count Java source lines of a project");
  sloc_cmd->add_option("path", sloc_path, "Project root")->required();
  sloc_cmd->add_flag("--json", json, "Print JSON");
  sloc_cmd->add_flag("--quiet", quiet, "Suppress warnings");

  CorpusArgs corpus;
  auto* run_cmd = app.add_subcommand(
      "corpus-run", "Fetch, analyze and compare every project of a manifest");
  run_cmd->add_option("--manifest", corpus.manifest, "Manifest CSV (default: built-in)");
  run_cmd->add_option("--cache", corpus.cache, "Clone cache (overrides MICRODEP_CACHE)");
  run_cmd->add_option("--out", corpus.out_dir, "Directory for corpus-report.json");
  run_cmd->add_option("--jobs", corpus.jobs, "Concurrent projects")
      ->check(CLI::PositiveNumber);
  run_cmd->add_flag("--json", corpus.json, "Print the report as JSON");
  run_cmd->add_flag("--quiet", quiet, "Suppress warnings");

  std::string report_path;
  auto* report_cmd = app.add_subcommand("corpus-report", "Render a saved corpus report");
  report_cmd->add_option("report", report_path, "corpus-report.json")->required();
  report_cmd->add_flag("--json", json, "Print JSON");

  auto* formats_cmd = app.add_subcommand("formats", "List output formats");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  Context ctx{working_dir, out, err, quiet};
  GitCli git;
  Vcs& client = vcs ? *vcs : static_cast<Vcs&>(git);
  try {
    if (analyze_cmd->parsed())
      return cmd_analyze(analyze, ctx);
    if (sloc_cmd->parsed())
      return cmd_sloc(sloc_path, json, ctx);
    if (run_cmd->parsed())
      return cmd_corpus_run(corpus, ctx, client);
    if (report_cmd->parsed())
      return cmd_corpus_report(report_path, json, ctx);
    if (formats_cmd->parsed()) {
      for (auto f : kAllFormats)
        out << to_string(f) << "\n";
      return kExitOk;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitAnalysisError;
  }
  return kExitUsage;
}

} // namespace microdep::cli
