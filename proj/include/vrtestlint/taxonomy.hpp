#pragma once

#include <map>
#include <string>
#include <vector>

#include "vrtestlint/config.hpp"
#include "vrtestlint/test_model.hpp"

namespace vrtestlint {

enum class LabelConfidence { Rule, Fallback };

struct TaxonomyLabel {
  std::string category;
  std::vector<std::string> matched_signals;
  LabelConfidence confidence = LabelConfidence::Rule;
  bool vr_specific = false;

  bool operator==(const TaxonomyLabel&) const = default;
};

inline constexpr const char* kFallbackCategory = "AppLogic";

/// Labels of every matching rule, lowest priority value first; a single
/// AppLogic fallback label when nothing matches.
std::vector<TaxonomyLabel> classify_test(const TestMethodInfo& test,
                                         const std::vector<TaxonomyRule>& rules);

/// Signals of one rule group present in `test`; empty when the group fails.
bool signal_present(const TestMethodInfo& test, const std::string& signal);

struct TaxonomySummary {
  std::map<std::string, int> counts;       // every rule category plus the fallback
  std::map<std::string, int> main_counts;  // by main category
  int test_count = 0;
  int vr_specific_tests = 0;
  double vr_specific_share = 0.0;

  bool operator==(const TaxonomySummary&) const = default;
};

TaxonomySummary taxonomy_summary(const std::map<std::string, std::vector<TaxonomyLabel>>& labels,
                                 const std::vector<TaxonomyRule>& rules);

std::string main_category_of(const std::string& category);

}  // namespace vrtestlint
