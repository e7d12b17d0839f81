#pragma once

#include <filesystem>
#include <optional>

#include "vrtestlint/config.hpp"
#include "vrtestlint/report.hpp"
#include "vrtestlint/scanner.hpp"

namespace vrtestlint {

struct AnalysisOptions {
  ScanOptions scan;
  std::optional<CoverageSummary> coverage;
  std::string project_id;  // defaults to the root path
  std::string timestamp;   // defaults to the current UTC time
};

/// Scan, test model, metrics, smells and taxonomy for one project root.
/// Throws ScanError when the root cannot be read.
ProjectReport analyze_project(const std::filesystem::path& root, const Config& config,
                              const AnalysisOptions& options = {});

/// Report assembly from an inventory that is already scanned.
ProjectReport analyze_inventory(const ProjectInventory& inventory, const Config& config,
                                const AnalysisOptions& options = {});

}  // namespace vrtestlint
