#include "vrtestlint/metrics.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace vrtestlint {

std::optional<double> safe_ratio(long long num, long long den) {
  if (den == 0) {
    if (num == 0) return 0.0;
    return std::nullopt;
  }
  return static_cast<double>(num) / static_cast<double>(den);
}

std::optional<double> compute_method_ratio(const ProjectInventory& inventory) {
  return safe_ratio(inventory.test_method_count, inventory.func_method_count);
}

std::optional<double> compute_class_ratio(const ProjectInventory& inventory) {
  return safe_ratio(inventory.test_class_count, inventory.func_class_count);
}

std::optional<double> compute_assertion_density(const TestMethodInfo& test) {
  if (test.body_loc <= 0) return std::nullopt;
  return static_cast<double>(test.assertions.size()) / static_cast<double>(test.body_loc);
}

DensityAggregate aggregate_density(const std::vector<TestClassInfo>& classes,
                                   std::vector<Diagnostic>* diagnostics) {
  DensityAggregate agg;
  std::vector<double> values;
  for (const auto& cls : classes) {
    for (const auto& test : cls.tests) {
      const auto density = compute_assertion_density(test);
      if (!density) {
        ++agg.skipped;
        if (diagnostics) {
          diagnostics->push_back({test.file, test.line, Severity::Warning,
                                  "assertion density skipped for " + test.name + ": no body lines"});
        }
        continue;
      }
      values.push_back(*density);
      agg.assertions += static_cast<int>(test.assertions.size());
      agg.loc += test.body_loc;
    }
  }
  agg.project = agg.loc == 0 ? 0.0 : static_cast<double>(agg.assertions) / agg.loc;
  if (!values.empty()) {
    std::sort(values.begin(), values.end());
    const auto n = values.size();
    agg.median = n % 2 == 1 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
  }
  return agg;
}

std::optional<double> compute_coverage_percentage(const CoverageSummary& summary) {
  if (summary.coverable_lines <= 0) return std::nullopt;
  return static_cast<double>(summary.covered_lines) / static_cast<double>(summary.coverable_lines);
}

namespace {

CoverageSummary finish(long long covered, long long coverable) {
  CoverageSummary s;
  s.covered_lines = covered;
  s.coverable_lines = coverable;
  s.no_coverable_code = coverable == 0;
  s.percentage = compute_coverage_percentage(s);
  return s;
}

bool parse_count(std::string_view text, long long& out) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
    text.remove_suffix(1);
  }
  if (text.empty() || text.size() > 18) return false;
  long long v = 0;
  for (const char c : text) {
    if (c < '0' || c > '9') return false;
    v = v * 10 + (c - '0');
  }
  out = v;
  return true;
}

}  // namespace

CoverageSummary parse_coverage_csv(std::string_view csv) {
  long long covered = 0;
  long long coverable = 0;
  int line_no = 0;
  bool any = false;
  std::size_t pos = 0;
  while (pos <= csv.size()) {
    auto end = csv.find('\n', pos);
    if (end == std::string_view::npos) end = csv.size();
    auto line = csv.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
      if (end == csv.size()) break;
      continue;
    }
    const auto comma = line.find(',');
    long long a = 0;
    long long b = 0;
    const bool ok = comma != std::string_view::npos && parse_count(line.substr(0, comma), a) &&
                    parse_count(line.substr(comma + 1), b);
    if (!ok) {
      if (!any && line_no == 1) continue;  // header
      throw CoverageError("coverage CSV line " + std::to_string(line_no) +
                          ": expected 'covered,coverable'");
    }
    if (a > b) {
      throw CoverageError("coverage CSV line " + std::to_string(line_no) +
                          ": covered exceeds coverable");
    }
    any = true;
    covered += a;
    coverable += b;
    if (end == csv.size()) break;
  }
  return finish(covered, coverable);
}

CoverageSummary ingest_coverage_report(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CoverageError("cannot read coverage report " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const auto text = buffer.str();
  const auto first = text.find_first_not_of(" \t\r\n\xEF\xBB\xBF");
  if (first != std::string::npos && text[first] == '<') return parse_opencover_xml(text);
  return parse_coverage_csv(text);
}

MetricsReport compute_metrics(const ProjectInventory& inventory,
                              const std::vector<TestClassInfo>& classes,
                              std::optional<CoverageSummary> coverage,
                              std::vector<Diagnostic>* diagnostics) {
  MetricsReport m;
  m.method_ratio = compute_method_ratio(inventory);
  m.class_ratio = compute_class_ratio(inventory);
  for (const auto& cls : classes) {
    for (const auto& test : cls.tests) {
      if (const auto d = compute_assertion_density(test)) m.per_test_density[test.id] = *d;
    }
  }
  const auto agg = aggregate_density(classes, diagnostics);
  m.project_density = agg.project;
  m.median_density = agg.median;
  m.total_assertions = agg.assertions;
  m.total_test_loc = agg.loc;
  m.coverage = std::move(coverage);
  return m;
}

}  // namespace vrtestlint
