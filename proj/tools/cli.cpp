#include "cli.hpp"

#include <fcntl.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <CLI11.hpp>
#include <cctype>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "vrtestlint/config.hpp"
#include "vrtestlint/metrics.hpp"
#include "vrtestlint/pipeline.hpp"
#include "vrtestlint/report.hpp"
#include "vrtestlint/text_util.hpp"

extern char** environ;

namespace vrtestlint::cli {

namespace fs = std::filesystem;

namespace {

struct Outputs {
  std::string json_path;
  std::string csv_dir;
  std::string markdown_path;
};

struct Thresholds {
  std::optional<double> min_method_ratio;
  std::optional<double> min_density;
  std::optional<double> max_smelly_fraction;
};

struct Common {
  Outputs outputs;
  Thresholds thresholds;
  std::string config_path;
  std::string coverage_path;
  int jobs = 0;
};

class CliFailure : public std::runtime_error {
 public:
  CliFailure(int code, const std::string& message) : std::runtime_error(message), code(code) {}
  int code;
};

void add_common(CLI::App& app, Common& c) {
  app.add_option("--json", c.outputs.json_path, "Write the JSON report to this file");
  app.add_option("--csv", c.outputs.csv_dir, "Write report.csv into this directory");
  app.add_option("--markdown", c.outputs.markdown_path, "Write a markdown summary to this file");
  app.add_option("--config", c.config_path, "JSON configuration file");
  app.add_option("--coverage-report", c.coverage_path, "OpenCover XML or covered,coverable CSV");
  app.add_option("--fail-under-method-ratio", c.thresholds.min_method_ratio,
                 "Exit 2 when the test-to-code method ratio is below this value")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--fail-under-density", c.thresholds.min_density,
                 "Exit 2 when the project assertion density is below this value")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--max-smelly-fraction", c.thresholds.max_smelly_fraction,
                 "Exit 2 when the share of smelly tests exceeds this value")
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--jobs", c.jobs, "Worker threads, 0 for the OpenMP default")->check(CLI::NonNegativeNumber);
}

Config resolve_config(const std::string& path) {
  std::string chosen = path;
  if (chosen.empty()) {
    if (const char* env = std::getenv("VRTESTLINT_CONFIG"); env != nullptr && *env != '\0') chosen = env;
  }
  if (chosen.empty()) return Config::defaults();
  try {
    return load_config(chosen);
  } catch (const ConfigError& e) {
    throw CliFailure(kExitUsage, e.what());
  }
}

std::optional<CoverageSummary> resolve_coverage(const std::string& path) {
  if (path.empty()) return std::nullopt;
  try {
    return ingest_coverage_report(path);
  } catch (const CoverageError& e) {
    throw CliFailure(kExitScanError, e.what());
  }
}

void write_file(const fs::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  out.close();
  if (!out) throw CliFailure(kExitScanError, "cannot write " + path.string());
}

void write_csv(const std::string& dir, const std::string& content) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  write_file(fs::path(dir) / "report.csv", content);
}

std::vector<std::string> threshold_violations(const ProjectReport& r, const Thresholds& t) {
  std::vector<std::string> out;
  if (r.status != "ok") return out;
  if (t.min_method_ratio && r.metrics.method_ratio && *r.metrics.method_ratio < *t.min_method_ratio) {
    out.push_back(r.project + ": method ratio " + std::to_string(*r.metrics.method_ratio) + " is below " +
                  std::to_string(*t.min_method_ratio));
  }
  if (t.min_density && r.metrics.project_density < *t.min_density) {
    out.push_back(r.project + ": assertion density " + std::to_string(r.metrics.project_density) +
                  " is below " + std::to_string(*t.min_density));
  }
  if (t.max_smelly_fraction && r.smell_summary.smelly_test_fraction > *t.max_smelly_fraction) {
    out.push_back(r.project + ": smelly test fraction " + std::to_string(r.smell_summary.smelly_test_fraction) +
                  " exceeds " + std::to_string(*t.max_smelly_fraction));
  }
  return out;
}

AnalysisOptions analysis_options(const Common& c, std::optional<CoverageSummary> coverage) {
  AnalysisOptions options;
  options.scan.jobs = c.jobs;
  options.scan.execution = c.jobs == 1 ? Execution::Serial : Execution::Parallel;
  options.coverage = std::move(coverage);
  return options;
}

int run_scan(const std::string& root, const Common& c, std::ostream& out, std::ostream& err) {
  const auto config = resolve_config(c.config_path);
  auto options = analysis_options(c, resolve_coverage(c.coverage_path));
  options.project_id = root;
  ProjectReport report;
  try {
    report = analyze_project(root, config, options);
  } catch (const ScanError& e) {
    throw CliFailure(kExitScanError, e.what());
  }
  const bool any_output =
      !c.outputs.json_path.empty() || !c.outputs.csv_dir.empty() || !c.outputs.markdown_path.empty();
  if (!c.outputs.json_path.empty()) write_file(c.outputs.json_path, to_json_text(report));
  if (!c.outputs.csv_dir.empty()) write_csv(c.outputs.csv_dir, to_csv({report}));
  if (!c.outputs.markdown_path.empty()) write_file(c.outputs.markdown_path, to_markdown(report));
  if (any_output) {
    out << report.project << ": " << report.counts.test_method_count << " tests, " << report.findings.size()
        << " smell findings, " << report.diagnostics.size() << " diagnostics\n";
  } else {
    out << to_json_text(report);
  }
  const auto violations = threshold_violations(report, c.thresholds);
  for (const auto& v : violations) err << "threshold violated: " << v << "\n";
  return violations.empty() ? kExitOk : kExitThreshold;
}

bool is_remote(const std::string& entry) {
  for (const char* prefix : {"http://", "https://", "git://", "ssh://", "file://", "git@"}) {
    if (entry.rfind(prefix, 0) == 0) return true;
  }
  std::error_code ec;
  return entry.size() > 4 && entry.compare(entry.size() - 4, 4, ".git") == 0 && !fs::is_directory(entry, ec);
}

std::string clone_dir_name(std::size_t index, const std::string& url) {
  std::string name = std::to_string(index) + "-";
  for (const char ch : url.substr(url.find_last_of("/:") + 1)) {
    name += std::isalnum(static_cast<unsigned char>(ch)) != 0 || ch == '-' || ch == '_' ? ch : '_';
  }
  return name;
}

std::optional<std::string> git_clone(const std::string& url, const fs::path& dest) {
  setenv("GIT_TERMINAL_PROMPT", "0", 1);
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_addopen(&actions, STDIN_FILENO, "/dev/null", O_RDONLY, 0);
  posix_spawn_file_actions_addopen(&actions, STDOUT_FILENO, "/dev/null", O_WRONLY, 0);
  const std::string dest_text = dest.string();
  std::vector<std::string> args = {"git", "clone", "--quiet", "--depth", "1", "--", url, dest_text};
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  argv.push_back(nullptr);
  pid_t pid = 0;
  const int rc = posix_spawnp(&pid, "git", &actions, nullptr, argv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) return "cannot run git: " + std::string(std::strerror(rc));
  int status = 0;
  if (waitpid(pid, &status, 0) < 0) return "waiting for git failed";
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    return "git clone failed with status " + std::to_string(WIFEXITED(status) ? WEXITSTATUS(status) : -1);
  }
  return std::nullopt;
}

std::vector<std::string> read_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CliFailure(kExitScanError, "cannot read corpus list " + path);
  std::vector<std::string> entries;
  std::string line;
  while (std::getline(in, line)) {
    auto entry = trim(line);
    if (entry.empty() || entry.front() == '#') continue;
    entries.emplace_back(entry);
  }
  return entries;
}

std::map<std::string, ProjectReport> previous_reports(const std::string& json_path, std::ostream& err) {
  std::map<std::string, ProjectReport> out;
  std::error_code ec;
  if (json_path.empty() || !fs::is_regular_file(json_path, ec)) return out;
  std::ifstream in(json_path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    for (auto& p : corpus_report_from_json(buffer.str()).projects) {
      if (p.status == "ok") out.emplace(p.project, std::move(p));
    }
  } catch (const ReportError& e) {
    err << "warning: ignoring unreadable previous report: " << e.what() << "\n";
  }
  return out;
}

int run_corpus(const std::string& list_file, const Common& c, bool resume, const std::string& work_dir,
               std::ostream& out, std::ostream& err) {
  const auto config = resolve_config(c.config_path);
  const auto entries = read_list(list_file);
  const auto coverage = resolve_coverage(c.coverage_path);
  const auto previous = resume ? previous_reports(c.outputs.json_path, err) : std::map<std::string, ProjectReport>{};
  const fs::path clones = work_dir.empty() ? fs::temp_directory_path() / "vrtestlint-clones" : fs::path(work_dir);

  CorpusReport corpus;
  corpus.tool_version = VRTESTLINT_VERSION;
  corpus.timestamp = utc_timestamp();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& entry = entries[i];
    if (const auto it = previous.find(entry); it != previous.end()) {
      corpus.projects.push_back(it->second);
      continue;
    }
    fs::path root = entry;
    ProjectReport report;
    report.project = entry;
    report.tool_version = corpus.tool_version;
    report.timestamp = corpus.timestamp;
    bool ok = true;
    if (is_remote(entry)) {
      root = clones / clone_dir_name(i, entry);
      std::error_code ec;
      const bool reuse = resume && fs::is_directory(root, ec) && !fs::is_empty(root, ec);
      if (!reuse) {
        fs::remove_all(root, ec);
        fs::create_directories(clones, ec);
        if (const auto failure = git_clone(entry, root)) {
          report.status = "failed";
          report.failure_reason = *failure;
          ok = false;
        }
      }
    }
    if (ok) {
      auto options = analysis_options(c, coverage);
      options.project_id = entry;
      options.timestamp = corpus.timestamp;
      try {
        report = analyze_project(root, config, options);
      } catch (const std::exception& e) {
        report.status = "failed";
        report.failure_reason = e.what();
      }
    }
    if (report.status != "ok") err << "entry failed: " << entry << ": " << report.failure_reason << "\n";
    corpus.projects.push_back(std::move(report));
    if (!c.outputs.json_path.empty()) {
      corpus.aggregates = compute_corpus_aggregates(corpus.projects);
      write_file(c.outputs.json_path, to_json_text(corpus));
    }
  }
  corpus.aggregates = compute_corpus_aggregates(corpus.projects);
  if (!c.outputs.json_path.empty()) write_file(c.outputs.json_path, to_json_text(corpus));
  if (!c.outputs.csv_dir.empty()) write_csv(c.outputs.csv_dir, to_csv(corpus.projects));
  if (!c.outputs.markdown_path.empty()) write_file(c.outputs.markdown_path, to_markdown(corpus));
  const auto& a = corpus.aggregates;
  out << a.project_count << " projects, " << a.analyzed_count << " analyzed, " << a.failed_count << " failed, "
      << a.projects_with_tests << " with tests\n";
  bool violated = false;
  for (const auto& p : corpus.projects) {
    for (const auto& v : threshold_violations(p, c.thresholds)) {
      err << "threshold violated: " << v << "\n";
      violated = true;
    }
  }
  return violated ? kExitThreshold : kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Static test-quality analysis for Unity C# projects", "vrtestlint"};
  app.set_version_flag("--version", VRTESTLINT_VERSION);
  app.require_subcommand(1);

  Common scan_opts;
  std::string scan_root;
  auto* scan = app.add_subcommand("scan", "Analyze one project directory");
  scan->add_option("path", scan_root, "Project root")->required();
  add_common(*scan, scan_opts);

  Common corpus_opts;
  std::string list_file;
  bool resume = false;
  std::string work_dir;
  auto* corpus = app.add_subcommand("corpus", "Analyze every project named in a list file");
  corpus->add_option("list-file", list_file, "One local path or git URL per line")->required();
  corpus->add_flag("--resume", resume, "Reuse entries already present in the --json report");
  corpus->add_option("--work-dir", work_dir, "Directory for cloned repositories");
  add_common(*corpus, corpus_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << VRTESTLINT_VERSION << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << "run 'vrtestlint --help' for usage\n";
    return kExitUsage;
  }

  try {
    if (scan->parsed()) return run_scan(scan_root, scan_opts, out, err);
    return run_corpus(list_file, corpus_opts, resume, work_dir, out, err);
  } catch (const CliFailure& e) {
    err << (e.code == kExitUsage ? "usage error: " : "error: ") << e.what() << "\n";
    return e.code;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitScanError;
  }
}

}  // namespace vrtestlint::cli
