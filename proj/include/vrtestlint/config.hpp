#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace vrtestlint {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-message arity bounds of one assertion API.
struct ArityRange {
  int min = 0;
  int max = 0;

  bool operator==(const ArityRange&) const = default;
};

/// One taxonomy category with its signals in disjunctive normal form: the rule
/// matches when every signal of at least one group is present. Signals are
/// prefixed `api:` (engine identifier), `kw:` (keyword at a word start),
/// `file:` (glob on the file name) or `struct:` (structural pattern).
struct TaxonomyRule {
  std::string category;  // "Main" or "Main.Sub"
  std::vector<std::vector<std::string>> signals;
  bool vr_specific = false;
  int priority = 0;

  [[nodiscard]] std::string main_category() const;
  bool operator==(const TaxonomyRule&) const = default;
};

struct Config {
  std::set<std::string> test_attributes;
  std::set<std::string> fixture_attributes;
  std::set<std::string> setup_attributes;
  std::set<std::string> teardown_attributes;
  std::set<std::string> assertion_receivers;
  std::map<std::string, ArityRange> assertion_arity;
  std::set<std::string> engine_apis;
  std::vector<std::string> resource_patterns;
  std::vector<std::string> mock_apis;
  std::vector<std::string> in_memory_patterns;
  std::vector<std::string> excluded_dirs;
  std::vector<std::string> exclude_globs;
  std::vector<TaxonomyRule> taxonomy_rules;
  bool eager_requires_assertion = false;

  static Config defaults();

  /// Engine identifiers plus every `api:` signal of the rule table.
  [[nodiscard]] std::set<std::string> engine_identifiers() const;
  [[nodiscard]] std::optional<ArityRange> arity_for(std::string_view api_name,
                                                    bool generic) const;
};

/// Applies a JSON config document over `base`. Present keys replace the
/// corresponding defaults; `taxonomyRules` may extend or replace the table.
Config apply_config_json(const Config& base, std::string_view json_text);

/// Reads a JSON config file on top of Config::defaults().
Config load_config(const std::filesystem::path& path);

/// Parses a rule table document of the shipped form.
std::vector<TaxonomyRule> parse_taxonomy_rules(std::string_view json_text);

std::string_view embedded_taxonomy_rules();
std::string_view embedded_assertion_arity();

}  // namespace vrtestlint
