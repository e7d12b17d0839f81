#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vrtestlint/diagnostic.hpp"
#include "vrtestlint/metrics.hpp"
#include "vrtestlint/smells.hpp"
#include "vrtestlint/taxonomy.hpp"

namespace vrtestlint {

inline constexpr int kSchemaVersion = 1;

class ReportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ReportFormat { Json, Csv, Markdown };

std::optional<ReportFormat> report_format_from_string(std::string_view text);

struct ProjectCounts {
  int func_class_count = 0;
  int func_method_count = 0;
  int test_class_count = 0;
  int test_method_count = 0;
  int source_files = 0;

  bool operator==(const ProjectCounts&) const = default;
};

struct ProjectReport {
  std::string project;  // path or repository URL
  std::string status = "ok";  // "ok" or "failed"
  std::string failure_reason;
  std::optional<std::string> unity_version;
  ProjectCounts counts;
  MetricsReport metrics;
  std::vector<SmellFinding> findings;
  SmellSummary smell_summary;
  std::map<std::string, std::vector<TaxonomyLabel>> taxonomy_labels;  // by test id
  TaxonomySummary taxonomy;
  std::vector<Diagnostic> diagnostics;
  std::string tool_version;
  std::string timestamp;  // UTC, RFC 3339

  bool operator==(const ProjectReport&) const = default;
};

struct CorpusAggregates {
  int project_count = 0;
  int analyzed_count = 0;
  int failed_count = 0;
  int projects_with_tests = 0;
  double fraction_with_tests = 0.0;        // over analyzed projects
  std::map<SmellKind, double> average_smell_fractions;  // over projects with tests
  std::optional<double> median_method_ratio;
  std::optional<double> median_class_ratio;

  bool operator==(const CorpusAggregates&) const = default;
};

struct CorpusReport {
  std::vector<ProjectReport> projects;
  CorpusAggregates aggregates;
  std::string tool_version;
  std::string timestamp;

  bool operator==(const CorpusReport&) const = default;
};

CorpusAggregates compute_corpus_aggregates(const std::vector<ProjectReport>& projects);

std::optional<double> median(std::vector<double> values);

/// Current UTC time as RFC 3339 with second precision.
std::string utc_timestamp();

std::string to_json_text(const ProjectReport& report);
std::string to_json_text(const CorpusReport& report);
ProjectReport project_report_from_json(std::string_view text);
CorpusReport corpus_report_from_json(std::string_view text);

/// One row per (project, metric) and one per finding.
std::string to_csv(const std::vector<ProjectReport>& projects);
std::string to_markdown(const ProjectReport& report);
std::string to_markdown(const CorpusReport& report);

std::string emit_report(const ProjectReport& report, ReportFormat format);
std::string emit_report(const CorpusReport& report, ReportFormat format);
/// Throws ReportError on an unknown format name.
std::string emit_report(const ProjectReport& report, std::string_view format);

std::string csv_escape(std::string_view cell);

}  // namespace vrtestlint
