#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vrtestlint/scanner.hpp"
#include "vrtestlint/test_model.hpp"

namespace vrtestlint {

class CoverageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CoverageSummary {
  long long coverable_lines = 0;  // sequence points for OpenCover input
  long long covered_lines = 0;
  std::optional<double> percentage;  // in [0, 1]; empty when nothing is coverable
  bool no_coverable_code = false;

  bool operator==(const CoverageSummary&) const = default;
};

/// Ratios are empty when undefined (a zero denominator with a non-zero numerator).
struct MetricsReport {
  std::optional<double> method_ratio;
  std::optional<double> class_ratio;
  std::map<std::string, double> per_test_density;
  double project_density = 0.0;
  std::optional<double> median_density;
  int total_assertions = 0;
  int total_test_loc = 0;
  std::optional<CoverageSummary> coverage;

  bool operator==(const MetricsReport&) const = default;
};

/// num / den; 0 when both are 0; empty when only den is 0.
std::optional<double> safe_ratio(long long num, long long den);

std::optional<double> compute_method_ratio(const ProjectInventory& inventory);
std::optional<double> compute_class_ratio(const ProjectInventory& inventory);

/// Assertions per body line; empty for a test without a body.
std::optional<double> compute_assertion_density(const TestMethodInfo& test);

struct DensityAggregate {
  double project = 0.0;  // ratio of sums
  std::optional<double> median;
  int assertions = 0;
  int loc = 0;
  int skipped = 0;
};

DensityAggregate aggregate_density(const std::vector<TestClassInfo>& classes,
                                   std::vector<Diagnostic>* diagnostics = nullptr);

/// OpenCover XML or a `covered,coverable` CSV, chosen by content.
CoverageSummary ingest_coverage_report(const std::filesystem::path& path);
CoverageSummary parse_opencover_xml(std::string_view xml);
CoverageSummary parse_coverage_csv(std::string_view csv);

std::optional<double> compute_coverage_percentage(const CoverageSummary& summary);

MetricsReport compute_metrics(const ProjectInventory& inventory,
                              const std::vector<TestClassInfo>& classes,
                              std::optional<CoverageSummary> coverage,
                              std::vector<Diagnostic>* diagnostics = nullptr);

}  // namespace vrtestlint
