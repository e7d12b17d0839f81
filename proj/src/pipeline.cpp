#include "vrtestlint/pipeline.hpp"

#include <algorithm>
#include <tuple>

#include "vrtestlint/metrics.hpp"
#include "vrtestlint/smells.hpp"
#include "vrtestlint/taxonomy.hpp"
#include "vrtestlint/test_model.hpp"

namespace vrtestlint {

ProjectReport analyze_inventory(const ProjectInventory& inventory, const Config& config,
                                const AnalysisOptions& options) {
  ProjectReport report;
  report.project = options.project_id.empty() ? inventory.root.string() : options.project_id;
  report.tool_version = VRTESTLINT_VERSION;
  report.timestamp = options.timestamp.empty() ? utc_timestamp() : options.timestamp;
  report.unity_version = inventory.unity_version;
  report.counts = {inventory.func_class_count, inventory.func_method_count, inventory.test_class_count,
                   inventory.test_method_count, static_cast<int>(inventory.source_units.size())};

  std::vector<Diagnostic> diagnostics = inventory.diagnostics;
  const auto index = build_production_index(inventory);
  const auto classes = options.scan.execution == Execution::Serial
                           ? build_test_model_serial(inventory, index, config, &diagnostics)
                           : build_test_model_parallel(inventory, index, config, &diagnostics,
                                                       options.scan.jobs);
  report.metrics = compute_metrics(inventory, classes, options.coverage, &diagnostics);
  report.findings = detect_smells(classes, config);

  int test_count = 0;
  for (const auto& cls : classes) {
    for (const auto& test : cls.tests) {
      ++test_count;
      report.taxonomy_labels[test.id] = classify_test(test, config.taxonomy_rules);
    }
  }
  report.smell_summary = smell_summary(report.findings, test_count);
  report.taxonomy = taxonomy_summary(report.taxonomy_labels, config.taxonomy_rules);

  std::stable_sort(diagnostics.begin(), diagnostics.end(), [](const Diagnostic& a, const Diagnostic& b) {
    return std::tie(a.file, a.line, a.severity, a.message) < std::tie(b.file, b.line, b.severity, b.message);
  });
  diagnostics.erase(std::unique(diagnostics.begin(), diagnostics.end()), diagnostics.end());
  report.diagnostics = std::move(diagnostics);
  return report;
}

ProjectReport analyze_project(const std::filesystem::path& root, const Config& config,
                              const AnalysisOptions& options) {
  const auto inventory = scan_project(root, config, options.scan);
  return analyze_inventory(inventory, config, options);
}

}  // namespace vrtestlint
