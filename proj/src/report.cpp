#include "vrtestlint/report.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <set>
#include <sstream>

#include <json.hpp>

namespace vrtestlint {

using nlohmann::json;

namespace {

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> opt_double(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

json coverage_json(const std::optional<CoverageSummary>& c) {
  if (!c) return nullptr;
  return {{"coverableLines", c->coverable_lines},
          {"coveredLines", c->covered_lines},
          {"percentage", opt_json(c->percentage)},
          {"noCoverableCode", c->no_coverable_code}};
}

std::optional<CoverageSummary> coverage_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  CoverageSummary c;
  c.coverable_lines = j.at("coverableLines").get<long long>();
  c.covered_lines = j.at("coveredLines").get<long long>();
  c.percentage = opt_double(j.at("percentage"));
  c.no_coverable_code = j.at("noCoverableCode").get<bool>();
  return c;
}

json metrics_json(const MetricsReport& m) {
  json density = json::object();
  for (const auto& [id, d] : m.per_test_density) density[id] = d;
  return {{"methodRatio", opt_json(m.method_ratio)},
          {"classRatio", opt_json(m.class_ratio)},
          {"projectDensity", m.project_density},
          {"medianDensity", opt_json(m.median_density)},
          {"totalAssertions", m.total_assertions},
          {"totalTestLoc", m.total_test_loc},
          {"perTestDensity", density},
          {"coverage", coverage_json(m.coverage)}};
}

MetricsReport metrics_from(const json& j) {
  MetricsReport m;
  m.method_ratio = opt_double(j.at("methodRatio"));
  m.class_ratio = opt_double(j.at("classRatio"));
  m.project_density = j.at("projectDensity").get<double>();
  m.median_density = opt_double(j.at("medianDensity"));
  m.total_assertions = j.at("totalAssertions").get<int>();
  m.total_test_loc = j.at("totalTestLoc").get<int>();
  for (const auto& [id, d] : j.at("perTestDensity").items()) m.per_test_density[id] = d.get<double>();
  m.coverage = coverage_from(j.at("coverage"));
  return m;
}

json finding_json(const SmellFinding& f) {
  json evidence = json::array();
  for (const auto& e : f.evidence) {
    evidence.push_back({{"line", e.line}, {"text", e.text}, {"related", e.related}});
  }
  return {{"kind", to_string(f.kind)},
          {"subject", f.subject},
          {"file", f.file},
          {"confidence", to_string(f.confidence)},
          {"evidence", evidence}};
}

SmellKind smell_kind_from(const json& j) {
  const auto kind = smell_from_string(j.get<std::string>());
  if (!kind) throw ReportError("unknown smell kind " + j.get<std::string>());
  return *kind;
}

SmellFinding finding_from(const json& j) {
  SmellFinding f;
  f.kind = smell_kind_from(j.at("kind"));
  f.subject = j.at("subject").get<std::string>();
  f.file = j.at("file").get<std::string>();
  const auto confidence = confidence_from_string(j.at("confidence").get<std::string>());
  if (!confidence) throw ReportError("unknown confidence " + j.at("confidence").get<std::string>());
  f.confidence = *confidence;
  for (const auto& e : j.at("evidence")) {
    f.evidence.push_back(
        {e.at("line").get<int>(), e.at("text").get<std::string>(), e.at("related").get<std::string>()});
  }
  return f;
}

template <class V>
json smell_map_json(const std::map<SmellKind, V>& m) {
  json out = json::object();
  for (const auto& [k, v] : m) out[std::string(to_string(k))] = v;
  return out;
}

template <class V>
std::map<SmellKind, V> smell_map_from(const json& j) {
  std::map<SmellKind, V> out;
  for (const auto& [k, v] : j.items()) out[smell_kind_from(json(k))] = v.template get<V>();
  return out;
}

json summary_json(const SmellSummary& s) {
  return {{"counts", smell_map_json(s.counts)},
          {"testFractions", smell_map_json(s.test_fractions)},
          {"testCount", s.test_count},
          {"smellyTests", s.smelly_tests},
          {"smellyTestFraction", s.smelly_test_fraction},
          {"noTests", s.no_tests}};
}

SmellSummary summary_from(const json& j) {
  SmellSummary s;
  s.counts = smell_map_from<int>(j.at("counts"));
  s.test_fractions = smell_map_from<double>(j.at("testFractions"));
  s.test_count = j.at("testCount").get<int>();
  s.smelly_tests = j.at("smellyTests").get<int>();
  s.smelly_test_fraction = j.at("smellyTestFraction").get<double>();
  s.no_tests = j.at("noTests").get<bool>();
  return s;
}

json taxonomy_json(const std::map<std::string, std::vector<TaxonomyLabel>>& labels, const TaxonomySummary& t) {
  json by_test = json::object();
  for (const auto& [id, list] : labels) {
    json arr = json::array();
    for (const auto& l : list) {
      arr.push_back({{"category", l.category},
                     {"matchedSignals", l.matched_signals},
                     {"confidence", l.confidence == LabelConfidence::Rule ? "rule" : "fallback"},
                     {"vrSpecific", l.vr_specific}});
    }
    by_test[id] = arr;
  }
  return {{"labels", by_test},
          {"counts", t.counts},
          {"mainCounts", t.main_counts},
          {"testCount", t.test_count},
          {"vrSpecificTests", t.vr_specific_tests},
          {"vrSpecificShare", t.vr_specific_share}};
}

void taxonomy_from(const json& j, std::map<std::string, std::vector<TaxonomyLabel>>& labels, TaxonomySummary& t) {
  for (const auto& [id, arr] : j.at("labels").items()) {
    auto& list = labels[id];
    for (const auto& l : arr) {
      const auto confidence = l.at("confidence").get<std::string>();
      if (confidence != "rule" && confidence != "fallback") {
        throw ReportError("unknown label confidence " + confidence);
      }
      list.push_back({l.at("category").get<std::string>(),
                      l.at("matchedSignals").get<std::vector<std::string>>(),
                      confidence == "rule" ? LabelConfidence::Rule : LabelConfidence::Fallback,
                      l.at("vrSpecific").get<bool>()});
    }
  }
  t.counts = j.at("counts").get<std::map<std::string, int>>();
  t.main_counts = j.at("mainCounts").get<std::map<std::string, int>>();
  t.test_count = j.at("testCount").get<int>();
  t.vr_specific_tests = j.at("vrSpecificTests").get<int>();
  t.vr_specific_share = j.at("vrSpecificShare").get<double>();
}

json diagnostics_json(const std::vector<Diagnostic>& diagnostics) {
  json arr = json::array();
  for (const auto& d : diagnostics) {
    arr.push_back({{"file", d.file}, {"line", d.line}, {"severity", to_string(d.severity)}, {"message", d.message}});
  }
  return arr;
}

std::vector<Diagnostic> diagnostics_from(const json& j) {
  std::vector<Diagnostic> out;
  for (const auto& d : j) {
    out.push_back({d.at("file").get<std::string>(), d.at("line").get<int>(),
                   severity_from_string(d.at("severity").get<std::string>()),
                   d.at("message").get<std::string>()});
  }
  return out;
}

json project_json(const ProjectReport& r) {
  return {{"schemaVersion", kSchemaVersion},
          {"project", r.project},
          {"status", r.status},
          {"failureReason", r.failure_reason},
          {"unityVersion", r.unity_version ? json(*r.unity_version) : json(nullptr)},
          {"toolVersion", r.tool_version},
          {"timestamp", r.timestamp},
          {"counts",
           {{"funcClassCount", r.counts.func_class_count},
            {"funcMethodCount", r.counts.func_method_count},
            {"testClassCount", r.counts.test_class_count},
            {"testMethodCount", r.counts.test_method_count},
            {"sourceFiles", r.counts.source_files}}},
          {"metrics", metrics_json(r.metrics)},
          {"findings", [&] {
             json arr = json::array();
             for (const auto& f : r.findings) arr.push_back(finding_json(f));
             return arr;
           }()},
          {"smellSummary", summary_json(r.smell_summary)},
          {"taxonomy", taxonomy_json(r.taxonomy_labels, r.taxonomy)},
          {"diagnostics", diagnostics_json(r.diagnostics)}};
}

void check_schema(const json& j) {
  const auto version = j.at("schemaVersion").get<int>();
  if (version != kSchemaVersion) {
    throw ReportError("unsupported schemaVersion " + std::to_string(version));
  }
}

ProjectReport project_from(const json& j) {
  check_schema(j);
  ProjectReport r;
  r.project = j.at("project").get<std::string>();
  r.status = j.at("status").get<std::string>();
  r.failure_reason = j.at("failureReason").get<std::string>();
  if (!j.at("unityVersion").is_null()) r.unity_version = j.at("unityVersion").get<std::string>();
  r.tool_version = j.at("toolVersion").get<std::string>();
  r.timestamp = j.at("timestamp").get<std::string>();
  const auto& c = j.at("counts");
  r.counts.func_class_count = c.at("funcClassCount").get<int>();
  r.counts.func_method_count = c.at("funcMethodCount").get<int>();
  r.counts.test_class_count = c.at("testClassCount").get<int>();
  r.counts.test_method_count = c.at("testMethodCount").get<int>();
  r.counts.source_files = c.at("sourceFiles").get<int>();
  r.metrics = metrics_from(j.at("metrics"));
  for (const auto& f : j.at("findings")) r.findings.push_back(finding_from(f));
  r.smell_summary = summary_from(j.at("smellSummary"));
  taxonomy_from(j.at("taxonomy"), r.taxonomy_labels, r.taxonomy);
  r.diagnostics = diagnostics_from(j.at("diagnostics"));
  return r;
}

json aggregates_json(const CorpusAggregates& a) {
  return {{"projectCount", a.project_count},
          {"analyzedCount", a.analyzed_count},
          {"failedCount", a.failed_count},
          {"projectsWithTests", a.projects_with_tests},
          {"fractionWithTests", a.fraction_with_tests},
          {"averageSmellFractions", smell_map_json(a.average_smell_fractions)},
          {"medianMethodRatio", opt_json(a.median_method_ratio)},
          {"medianClassRatio", opt_json(a.median_class_ratio)}};
}

CorpusAggregates aggregates_from(const json& j) {
  CorpusAggregates a;
  a.project_count = j.at("projectCount").get<int>();
  a.analyzed_count = j.at("analyzedCount").get<int>();
  a.failed_count = j.at("failedCount").get<int>();
  a.projects_with_tests = j.at("projectsWithTests").get<int>();
  a.fraction_with_tests = j.at("fractionWithTests").get<double>();
  a.average_smell_fractions = smell_map_from<double>(j.at("averageSmellFractions"));
  a.median_method_ratio = opt_double(j.at("medianMethodRatio"));
  a.median_class_ratio = opt_double(j.at("medianClassRatio"));
  return a;
}

json parse_document(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ReportError(std::string("malformed report JSON: ") + e.what());
  }
}

std::string number_text(double v) { return json(v).dump(); }

std::string opt_text(const std::optional<double>& v) { return v ? number_text(*v) : std::string(); }

std::string percent(const std::optional<double>& v) {
  if (!v) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", *v * 100.0);
  return buf;
}

std::string fixed(const std::optional<double>& v, int digits = 4) {
  if (!v) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, *v);
  return buf;
}

std::string md_cell(std::string_view text) {
  std::string out;
  for (const char c : text) {
    if (c == '|') out += "\\|";
    else if (c == '\n' || c == '\r') out += ' ';
    else out += c;
  }
  return out;
}

void project_markdown(std::ostringstream& out, const ProjectReport& r) {
  out << "## " << md_cell(r.project) << "\n\n";
  if (r.status != "ok") {
    out << "Analysis failed: " << md_cell(r.failure_reason) << "\n\n";
    return;
  }
  out << "| Metric | Value |\n|---|---|\n";
  out << "| Unity version | " << md_cell(r.unity_version.value_or("unknown")) << " |\n";
  out << "| Functional classes | " << r.counts.func_class_count << " |\n";
  out << "| Functional methods | " << r.counts.func_method_count << " |\n";
  out << "| Test classes | " << r.counts.test_class_count << " |\n";
  out << "| Test methods | " << r.counts.test_method_count << " |\n";
  out << "| Method ratio | " << fixed(r.metrics.method_ratio) << " |\n";
  out << "| Class ratio | " << fixed(r.metrics.class_ratio) << " |\n";
  out << "| Assertion density | " << fixed(r.metrics.project_density) << " |\n";
  out << "| Median density | " << fixed(r.metrics.median_density) << " |\n";
  out << "| Coverage | "
      << (r.metrics.coverage ? percent(r.metrics.coverage->percentage) : std::string("not supplied")) << " |\n";
  out << "| Smelly tests | " << r.smell_summary.smelly_tests << " of " << r.smell_summary.test_count << " |\n\n";

  out << "### Smells\n\n| Smell | Findings | Share of tests |\n|---|---|---|\n";
  for (const auto kind : kAllSmells) {
    const auto count = r.smell_summary.counts.count(kind) ? r.smell_summary.counts.at(kind) : 0;
    const auto frac = r.smell_summary.test_fractions.count(kind) ? r.smell_summary.test_fractions.at(kind) : 0.0;
    out << "| " << to_string(kind) << " | " << count << " | " << percent(frac) << " |\n";
  }
  out << "\n";
  if (!r.findings.empty()) {
    out << "| Smell | Subject | Line | Confidence | Evidence |\n|---|---|---|---|---|\n";
    for (const auto& f : r.findings) {
      const int line = f.evidence.empty() ? 0 : f.evidence.front().line;
      const std::string text = f.evidence.empty() ? std::string() : f.evidence.front().text;
      out << "| " << to_string(f.kind) << " | " << md_cell(f.subject) << " | " << line << " | "
          << to_string(f.confidence) << " | " << md_cell(text) << " |\n";
    }
    out << "\n";
  }

  out << "### Test categories\n\n| Category | Tests |\n|---|---|\n";
  for (const auto& [category, count] : r.taxonomy.counts) {
    if (count > 0) out << "| " << md_cell(category) << " | " << count << " |\n";
  }
  out << "\nVR-specific tests: " << r.taxonomy.vr_specific_tests << " of " << r.taxonomy.test_count << "\n\n";
  if (!r.diagnostics.empty()) out << "Diagnostics: " << r.diagnostics.size() << "\n\n";
}

}  // namespace

std::optional<ReportFormat> report_format_from_string(std::string_view text) {
  if (text == "json") return ReportFormat::Json;
  if (text == "csv") return ReportFormat::Csv;
  if (text == "markdown" || text == "md") return ReportFormat::Markdown;
  return std::nullopt;
}

std::optional<double> median(std::vector<double> values) {
  if (values.empty()) return std::nullopt;
  std::sort(values.begin(), values.end());
  const auto n = values.size();
  return n % 2 == 1 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

CorpusAggregates compute_corpus_aggregates(const std::vector<ProjectReport>& projects) {
  CorpusAggregates a;
  a.project_count = static_cast<int>(projects.size());
  std::map<SmellKind, double> sums;
  for (const auto kind : kAllSmells) sums[kind] = 0.0;
  std::vector<double> method_ratios;
  std::vector<double> class_ratios;
  for (const auto& p : projects) {
    if (p.status != "ok") {
      ++a.failed_count;
      continue;
    }
    ++a.analyzed_count;
    if (p.metrics.method_ratio) method_ratios.push_back(*p.metrics.method_ratio);
    if (p.metrics.class_ratio) class_ratios.push_back(*p.metrics.class_ratio);
    if (p.counts.test_method_count == 0) continue;
    ++a.projects_with_tests;
    for (const auto kind : kAllSmells) {
      const auto it = p.smell_summary.test_fractions.find(kind);
      if (it != p.smell_summary.test_fractions.end()) sums[kind] += it->second;
    }
  }
  a.fraction_with_tests =
      a.analyzed_count == 0 ? 0.0 : static_cast<double>(a.projects_with_tests) / a.analyzed_count;
  for (const auto& [kind, sum] : sums) {
    a.average_smell_fractions[kind] = a.projects_with_tests == 0 ? 0.0 : sum / a.projects_with_tests;
  }
  a.median_method_ratio = median(method_ratios);
  a.median_class_ratio = median(class_ratios);
  return a;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string to_json_text(const ProjectReport& report) { return project_json(report).dump(2) + "\n"; }

std::string to_json_text(const CorpusReport& report) {
  json projects = json::array();
  for (const auto& p : report.projects) projects.push_back(project_json(p));
  const json doc = {{"schemaVersion", kSchemaVersion},
                    {"toolVersion", report.tool_version},
                    {"timestamp", report.timestamp},
                    {"aggregates", aggregates_json(report.aggregates)},
                    {"projects", projects}};
  return doc.dump(2) + "\n";
}

ProjectReport project_report_from_json(std::string_view text) {
  const auto doc = parse_document(text);
  try {
    return project_from(doc);
  } catch (const json::exception& e) {
    throw ReportError(std::string("invalid project report: ") + e.what());
  }
}

CorpusReport corpus_report_from_json(std::string_view text) {
  const auto doc = parse_document(text);
  try {
    check_schema(doc);
    CorpusReport r;
    r.tool_version = doc.at("toolVersion").get<std::string>();
    r.timestamp = doc.at("timestamp").get<std::string>();
    r.aggregates = aggregates_from(doc.at("aggregates"));
    for (const auto& p : doc.at("projects")) r.projects.push_back(project_from(p));
    return r;
  } catch (const json::exception& e) {
    throw ReportError(std::string("invalid corpus report: ") + e.what());
  }
}

std::string csv_escape(std::string_view cell) {
  const bool quote = cell.find_first_of(",\"\n\r") != std::string_view::npos;
  if (!quote) return std::string(cell);
  std::string out = "\"";
  for (const char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string to_csv(const std::vector<ProjectReport>& projects) {
  std::ostringstream out;
  out << "project,record,metric,value,kind,subject,file,line,confidence,evidence\n";
  auto metric = [&](const ProjectReport& p, std::string_view name, const std::string& value) {
    out << csv_escape(p.project) << ",metric," << name << "," << csv_escape(value) << ",,,,,,\n";
  };
  for (const auto& p : projects) {
    metric(p, "status", p.status);
    metric(p, "unityVersion", p.unity_version.value_or(""));
    metric(p, "funcClassCount", std::to_string(p.counts.func_class_count));
    metric(p, "funcMethodCount", std::to_string(p.counts.func_method_count));
    metric(p, "testClassCount", std::to_string(p.counts.test_class_count));
    metric(p, "testMethodCount", std::to_string(p.counts.test_method_count));
    metric(p, "methodRatio", opt_text(p.metrics.method_ratio));
    metric(p, "classRatio", opt_text(p.metrics.class_ratio));
    metric(p, "projectDensity", number_text(p.metrics.project_density));
    metric(p, "medianDensity", opt_text(p.metrics.median_density));
    metric(p, "totalAssertions", std::to_string(p.metrics.total_assertions));
    metric(p, "totalTestLoc", std::to_string(p.metrics.total_test_loc));
    metric(p, "coveragePercentage", p.metrics.coverage ? opt_text(p.metrics.coverage->percentage) : "");
    metric(p, "smellyTestFraction", number_text(p.smell_summary.smelly_test_fraction));
    for (const auto kind : kAllSmells) {
      const auto it = p.smell_summary.counts.find(kind);
      metric(p, "smell." + std::string(to_string(kind)),
             std::to_string(it == p.smell_summary.counts.end() ? 0 : it->second));
    }
    for (const auto& f : p.findings) {
      const int line = f.evidence.empty() ? 0 : f.evidence.front().line;
      std::string evidence;
      for (const auto& e : f.evidence) {
        if (!evidence.empty()) evidence += "; ";
        evidence += e.text;
      }
      out << csv_escape(p.project) << ",finding,,," << to_string(f.kind) << "," << csv_escape(f.subject) << ","
          << csv_escape(f.file) << "," << line << "," << to_string(f.confidence) << "," << csv_escape(evidence)
          << "\n";
    }
  }
  return out.str();
}

std::string to_markdown(const ProjectReport& report) {
  std::ostringstream out;
  out << "# Test analysis report\n\nGenerated " << report.timestamp << " by vrtestlint " << report.tool_version
      << ".\n\n";
  project_markdown(out, report);
  return out.str();
}

std::string to_markdown(const CorpusReport& report) {
  std::ostringstream out;
  const auto& a = report.aggregates;
  out << "# Corpus test analysis report\n\nGenerated " << report.timestamp << " by vrtestlint "
      << report.tool_version << ".\n\n";
  out << "| Aggregate | Value |\n|---|---|\n";
  out << "| Projects | " << a.project_count << " |\n";
  out << "| Analyzed | " << a.analyzed_count << " |\n";
  out << "| Failed | " << a.failed_count << " |\n";
  out << "| Projects with tests | " << a.projects_with_tests << " (" << percent(a.fraction_with_tests) << ") |\n";
  out << "| Median method ratio | " << fixed(a.median_method_ratio) << " |\n";
  out << "| Median class ratio | " << fixed(a.median_class_ratio) << " |\n\n";
  out << "## Share of smelly tests per project\n\n| Project |";
  for (const auto kind : kAllSmells) out << " " << to_string(kind) << " |";
  out << "\n|---|";
  for (std::size_t i = 0; i < std::size(kAllSmells); ++i) out << "---|";
  out << "\n";
  for (const auto& p : report.projects) {
    if (p.status != "ok" || p.counts.test_method_count == 0) continue;
    out << "| " << md_cell(p.project) << " |";
    for (const auto kind : kAllSmells) {
      const auto it = p.smell_summary.test_fractions.find(kind);
      out << " " << percent(it == p.smell_summary.test_fractions.end() ? 0.0 : it->second) << " |";
    }
    out << "\n";
  }
  out << "| Average |";
  for (const auto kind : kAllSmells) {
    const auto it = a.average_smell_fractions.find(kind);
    out << " " << percent(it == a.average_smell_fractions.end() ? 0.0 : it->second) << " |";
  }
  out << "\n\n";
  for (const auto& p : report.projects) project_markdown(out, p);
  return out.str();
}

std::string emit_report(const ProjectReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::Json: return to_json_text(report);
    case ReportFormat::Csv: return to_csv({report});
    case ReportFormat::Markdown: return to_markdown(report);
  }
  return {};
}

std::string emit_report(const CorpusReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::Json: return to_json_text(report);
    case ReportFormat::Csv: return to_csv(report.projects);
    case ReportFormat::Markdown: return to_markdown(report);
  }
  return {};
}

std::string emit_report(const ProjectReport& report, std::string_view format) {
  const auto parsed = report_format_from_string(format);
  if (!parsed) throw ReportError("unknown report format '" + std::string(format) + "'");
  return emit_report(report, *parsed);
}

}  // namespace vrtestlint
