#include "vrtestlint/scanner.hpp"

#include <fnmatch.h>
#include <omp.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <system_error>

#include "vrtestlint/parser.hpp"
#include "vrtestlint/text_util.hpp"

namespace vrtestlint {

namespace fs = std::filesystem;

namespace {

bool excluded_dir(const fs::path& dir, const Config& config) {
  const auto name = dir.filename().string();
  return std::any_of(config.excluded_dirs.begin(), config.excluded_dirs.end(),
                     [&](const std::string& ex) { return iequals(name, ex); });
}

bool excluded_file(const fs::path& relative, const Config& config) {
  const auto name = relative.filename().string();
  const auto rel = relative.generic_string();
  return std::any_of(config.exclude_globs.begin(), config.exclude_globs.end(),
                     [&](const std::string& glob) {
                       const auto& subject = glob.find('/') == std::string::npos ? name : rel;
                       return fnmatch(glob.c_str(), subject.c_str(), 0) == 0;
                     });
}

SyntaxUnit parse_one(const fs::path& root, const fs::path& relative) {
  const auto rel = relative.generic_string();
  std::ifstream in(root / relative, std::ios::binary);
  std::ostringstream buffer;
  if (in) buffer << in.rdbuf();
  if (!in || in.bad()) {
    SyntaxUnit unit;
    unit.path = rel;
    unit.encoding_ok = false;
    unit.diagnostics.push_back({rel, 0, Severity::Fatal, "cannot read file"});
    return unit;
  }
  const auto source = buffer.str();
  auto unit = parse_source(source, rel);
  if (!unit.encoding_ok) {
    unit.diagnostics.push_back({rel, 0, Severity::Fatal, "file is not UTF-8; skipped"});
  }
  return unit;
}

void count_types(const std::vector<TypeDecl>& types, const Config& config, bool test_unit,
                 ProjectInventory& inv) {
  for_each_type(types, [&](const TypeDecl& type) {
    if (test_unit) {
      int tests = 0;
      for (const auto& m : type.methods) tests += is_test_method(m, config) ? 1 : 0;
      inv.test_method_count += tests;
      if (tests > 0 || has_attribute(type.attributes, config.fixture_attributes)) {
        ++inv.test_class_count;
      }
      return;
    }
    if (type.kind == TypeKind::Class || type.kind == TypeKind::Struct) ++inv.func_class_count;
    for (const auto& m : type.methods) inv.func_method_count += m.has_body ? 1 : 0;
  });
}

}  // namespace

const std::vector<DeclarationSite>* ProductionIndex::find(const std::string& key) const {
  const auto it = entries.find(key);
  return it == entries.end() ? nullptr : &it->second;
}

std::vector<fs::path> list_source_files(const fs::path& root, const Config& config,
                                        std::vector<Diagnostic>* diagnostics) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    throw ScanError("not a readable directory: " + root.string());
  }
  std::vector<fs::path> files;
  fs::recursive_directory_iterator it(root, fs::directory_options::skip_permission_denied, ec);
  if (ec) throw ScanError("cannot open directory " + root.string() + ": " + ec.message());
  for (const fs::recursive_directory_iterator end; it != end; it.increment(ec)) {
    if (ec) {
      if (diagnostics) {
        diagnostics->push_back({root.string(), 0, Severity::Warning,
                                "directory walk error: " + ec.message()});
      }
      ec.clear();
      continue;
    }
    const auto& entry = *it;
    std::error_code type_ec;
    if (entry.is_directory(type_ec)) {
      if (excluded_dir(entry.path(), config)) it.disable_recursion_pending();
      continue;
    }
    if (!entry.is_regular_file(type_ec) || entry.path().extension() != ".cs") continue;
    auto relative = entry.path().lexically_relative(root);
    if (excluded_file(relative, config)) continue;
    files.push_back(std::move(relative));
  }
  std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
    return a.generic_string() < b.generic_string();
  });
  return files;
}

std::vector<SyntaxUnit> parse_files_serial(const fs::path& root, const std::vector<fs::path>& files) {
  std::vector<SyntaxUnit> units;
  units.reserve(files.size());
  for (const auto& file : files) units.push_back(parse_one(root, file));
  return units;
}

std::vector<SyntaxUnit> parse_files_parallel(const fs::path& root, const std::vector<fs::path>& files,
                                             int jobs) {
  std::vector<SyntaxUnit> units(files.size());
  const auto n = static_cast<long>(files.size());
  const int threads = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (long i = 0; i < n; ++i) {
    units[static_cast<std::size_t>(i)] = parse_one(root, files[static_cast<std::size_t>(i)]);
  }
  return units;
}

ProjectInventory assemble_inventory(fs::path root, std::vector<SyntaxUnit> units, const Config& config) {
  ProjectInventory inv;
  inv.root = std::move(root);
  for (auto& unit : units) {
    inv.diagnostics.insert(inv.diagnostics.end(), unit.diagnostics.begin(), unit.diagnostics.end());
    if (!unit.encoding_ok) continue;
    const auto role = classify_file(unit, config);
    const auto index = inv.source_units.size();
    if (role == FileRole::Test) {
      inv.test_units.push_back(index);
    } else {
      inv.functional_units.push_back(index);
      bool setup_only = false;
      for_each_type(unit.declarations, [&](const TypeDecl& type) {
        for (const auto& m : type.methods) {
          if (has_attribute(m.attributes, config.setup_attributes)) setup_only = true;
        }
      });
      if (setup_only) {
        inv.diagnostics.push_back({unit.path, 0, Severity::Note,
                                   "fixture-only file: setup methods without tests"});
      }
    }
    count_types(unit.declarations, config, role == FileRole::Test, inv);
    inv.source_units.push_back(std::move(unit));
  }
  return inv;
}

ProjectInventory scan_project(const fs::path& root, const Config& config, const ScanOptions& options) {
  std::vector<Diagnostic> diagnostics;
  const auto files = list_source_files(root, config, &diagnostics);
  auto units = options.execution == Execution::Serial ? parse_files_serial(root, files)
                                                      : parse_files_parallel(root, files, options.jobs);
  auto inv = assemble_inventory(root, std::move(units), config);
  inv.unity_version = detect_unity_version(root, &diagnostics);
  inv.diagnostics.insert(inv.diagnostics.begin(), diagnostics.begin(), diagnostics.end());
  return inv;
}

std::optional<std::string> detect_unity_version(const fs::path& root, std::vector<Diagnostic>* diagnostics) {
  const auto file = root / "ProjectSettings" / "ProjectVersion.txt";
  std::error_code ec;
  if (!fs::is_regular_file(file, ec)) return std::nullopt;
  std::ifstream in(file);
  std::string line;
  constexpr std::string_view key = "m_EditorVersion:";
  while (std::getline(in, line)) {
    const auto pos = line.find(key);
    if (pos == std::string::npos) continue;
    auto value = line.substr(pos + key.size());
    const auto first = value.find_first_not_of(" \t");
    const auto last = value.find_last_not_of(" \t\r");
    if (first == std::string::npos) break;
    return value.substr(first, last - first + 1);
  }
  if (diagnostics) {
    diagnostics->push_back({"ProjectSettings/ProjectVersion.txt", 0, Severity::Warning,
                            "no m_EditorVersion entry"});
  }
  return std::nullopt;
}

std::string unity_major(const std::string& version) {
  std::size_t n = 0;
  while (n < version.size() && std::isdigit(static_cast<unsigned char>(version[n]))) ++n;
  return version.substr(0, n);
}

bool has_attribute(const std::vector<AttributeUse>& attributes, const std::set<std::string>& names) {
  return std::any_of(attributes.begin(), attributes.end(),
                     [&](const AttributeUse& a) { return names.contains(a.name); });
}

bool is_test_method(const MethodDecl& method, const Config& config) {
  return has_attribute(method.attributes, config.test_attributes);
}

bool is_test_type(const TypeDecl& type, const Config& config) {
  if (has_attribute(type.attributes, config.fixture_attributes)) return true;
  return std::any_of(type.methods.begin(), type.methods.end(),
                     [&](const MethodDecl& m) { return is_test_method(m, config); });
}

FileRole classify_file(const SyntaxUnit& unit, const Config& config) {
  bool test = false;
  for_each_type(unit.declarations, [&](const TypeDecl& type) { test = test || is_test_type(type, config); });
  return test ? FileRole::Test : FileRole::Functional;
}

ProductionIndex build_production_index(const ProjectInventory& inventory) {
  ProductionIndex index;
  for (const auto i : inventory.functional_units) {
    const auto& unit = inventory.source_units[i];
    for_each_type(unit.declarations, [&](const TypeDecl& type) {
      for (const auto& m : type.methods) {
        if (!m.has_body) continue;
        DeclarationSite site{unit.path, type.name, m.name, m.signature_line};
        if (m.kind == MethodKind::Conversion) site.type_name = simple_type_name(m.conversion_target);
        index.entries[m.name].push_back(site);
        index.entries[site.type_name + "." + m.name].push_back(site);
        ++index.site_count;
      }
    });
  }
  return index;
}

}  // namespace vrtestlint
