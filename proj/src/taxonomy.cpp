#include "vrtestlint/taxonomy.hpp"

#include <fnmatch.h>

#include <algorithm>
#include <set>

#include "vrtestlint/text_util.hpp"

namespace vrtestlint {

std::string main_category_of(const std::string& category) {
  const auto dot = category.find('.');
  return dot == std::string::npos ? category : category.substr(0, dot);
}

bool signal_present(const TestMethodInfo& test, const std::string& signal) {
  const auto colon = signal.find(':');
  if (colon == std::string::npos) return false;
  const auto prefix = std::string_view(signal).substr(0, colon);
  const auto value = signal.substr(colon + 1);
  if (prefix == "api") return test.api_signals.contains(value);
  if (prefix == "struct") return test.structural_signals.contains(value);
  if (prefix == "kw") {
    return std::any_of(test.keywords.begin(), test.keywords.end(),
                       [&](const std::string& k) { return matches_at_word_start(k, value); });
  }
  if (prefix == "file") {
    const auto slash = test.file.find_last_of('/');
    const auto name = slash == std::string::npos ? test.file : test.file.substr(slash + 1);
    return fnmatch(value.c_str(), name.c_str(), 0) == 0;
  }
  return false;
}

std::vector<TaxonomyLabel> classify_test(const TestMethodInfo& test, const std::vector<TaxonomyRule>& rules) {
  std::vector<const TaxonomyRule*> order;
  for (const auto& rule : rules) order.push_back(&rule);
  std::stable_sort(order.begin(), order.end(), [](const TaxonomyRule* a, const TaxonomyRule* b) {
    return a->priority < b->priority;
  });
  std::vector<TaxonomyLabel> labels;
  for (const auto* rule : order) {
    std::set<std::string> matched;
    for (const auto& group : rule->signals) {
      const bool all = !group.empty() && std::all_of(group.begin(), group.end(), [&](const std::string& s) {
        return signal_present(test, s);
      });
      if (all) matched.insert(group.begin(), group.end());
    }
    if (matched.empty()) continue;
    labels.push_back({rule->category, {matched.begin(), matched.end()}, LabelConfidence::Rule,
                      rule->vr_specific});
  }
  if (labels.empty()) labels.push_back({kFallbackCategory, {}, LabelConfidence::Fallback, false});
  return labels;
}

TaxonomySummary taxonomy_summary(const std::map<std::string, std::vector<TaxonomyLabel>>& labels,
                                 const std::vector<TaxonomyRule>& rules) {
  TaxonomySummary s;
  for (const auto& rule : rules) {
    s.counts[rule.category] = 0;
    s.main_counts[rule.main_category()] = 0;
  }
  s.counts[kFallbackCategory] += 0;
  s.main_counts[kFallbackCategory] += 0;
  for (const auto& [test, test_labels] : labels) {
    ++s.test_count;
    bool vr = false;
    std::set<std::string> mains;
    for (const auto& label : test_labels) {
      ++s.counts[label.category];
      mains.insert(main_category_of(label.category));
      vr = vr || label.vr_specific;
    }
    for (const auto& m : mains) ++s.main_counts[m];
    if (vr) ++s.vr_specific_tests;
  }
  s.vr_specific_share = s.test_count == 0 ? 0.0 : static_cast<double>(s.vr_specific_tests) / s.test_count;
  return s;
}

}  // namespace vrtestlint
