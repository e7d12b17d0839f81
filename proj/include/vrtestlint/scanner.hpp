#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "vrtestlint/config.hpp"
#include "vrtestlint/syntax.hpp"

namespace vrtestlint {

class ScanError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class FileRole { Test, Functional };

enum class Execution { Serial, Parallel };

struct ScanOptions {
  Execution execution = Execution::Parallel;
  int jobs = 0;  // 0: OpenMP default
};

struct ProjectInventory {
  std::filesystem::path root;
  std::optional<std::string> unity_version;
  std::vector<SyntaxUnit> source_units;  // sorted by path, paths relative to root
  std::vector<std::size_t> test_units;   // indices into source_units
  std::vector<std::size_t> functional_units;
  int func_class_count = 0;
  int func_method_count = 0;
  int test_class_count = 0;
  int test_method_count = 0;
  std::vector<Diagnostic> diagnostics;  // scan-level plus every unit's diagnostics
};

struct DeclarationSite {
  std::string file;
  std::string type_name;
  std::string method_name;
  int line = 0;

  auto operator<=>(const DeclarationSite&) const = default;
};

/// Methods with bodies declared in functional units, keyed by simple name and
/// by `Type.Method`. Conversion operators use their target type as qualifier.
struct ProductionIndex {
  std::map<std::string, std::vector<DeclarationSite>> entries;
  std::size_t site_count = 0;

  [[nodiscard]] const std::vector<DeclarationSite>* find(const std::string& key) const;
};

/// Lists the .cs files under root in sorted relative-path order, honouring
/// excluded directory names (case-insensitive) and file-name globs.
std::vector<std::filesystem::path> list_source_files(const std::filesystem::path& root,
                                                     const Config& config,
                                                     std::vector<Diagnostic>* diagnostics);

/// Reads and parses `files` (relative to root). Units come back in input order;
/// unreadable files yield a unit with a Fatal diagnostic and encoding_ok false.
std::vector<SyntaxUnit> parse_files_serial(const std::filesystem::path& root,
                                           const std::vector<std::filesystem::path>& files);
std::vector<SyntaxUnit> parse_files_parallel(const std::filesystem::path& root,
                                             const std::vector<std::filesystem::path>& files,
                                             int jobs = 0);

ProjectInventory scan_project(const std::filesystem::path& root, const Config& config,
                              const ScanOptions& options = {});

/// Builds an inventory from already parsed units (paths taken as given).
ProjectInventory assemble_inventory(std::filesystem::path root, std::vector<SyntaxUnit> units,
                                    const Config& config);

std::optional<std::string> detect_unity_version(const std::filesystem::path& root,
                                                std::vector<Diagnostic>* diagnostics = nullptr);

/// "2019.4.1f1" -> "2019", "5.6.3p1" -> "5"; empty when no leading number.
std::string unity_major(const std::string& version);

FileRole classify_file(const SyntaxUnit& unit, const Config& config);

bool has_attribute(const std::vector<AttributeUse>& attributes, const std::set<std::string>& names);
bool is_test_method(const MethodDecl& method, const Config& config);
bool is_test_type(const TypeDecl& type, const Config& config);

ProductionIndex build_production_index(const ProjectInventory& inventory);

}  // namespace vrtestlint
