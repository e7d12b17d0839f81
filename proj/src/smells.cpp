#include "vrtestlint/smells.hpp"

#include <algorithm>
#include <set>

namespace vrtestlint {

std::string_view to_string(SmellKind kind) {
  switch (kind) {
    case SmellKind::AR: return "AR";
    case SmellKind::GF: return "GF";
    case SmellKind::SE: return "SE";
    case SmellKind::ET: return "ET";
    case SmellKind::LT: return "LT";
    case SmellKind::MG: return "MG";
  }
  return "AR";
}

std::optional<SmellKind> smell_from_string(std::string_view text) {
  for (const auto kind : kAllSmells) {
    if (to_string(kind) == text) return kind;
  }
  return std::nullopt;
}

std::string_view to_string(Confidence confidence) {
  return confidence == Confidence::Definite ? "definite" : "heuristic";
}

std::optional<Confidence> confidence_from_string(std::string_view text) {
  if (text == "definite") return Confidence::Definite;
  if (text == "heuristic") return Confidence::Heuristic;
  return std::nullopt;
}

std::string class_id(const TestClassInfo& cls) { return cls.file + "::" + cls.name; }

std::vector<SmellFinding> detect_assertion_roulette(const TestMethodInfo& test) {
  if (test.assertions.size() <= 1) return {};
  SmellFinding f{SmellKind::AR, test.id, test.file, {}, Confidence::Definite};
  for (const auto& a : test.assertions) {
    if (!a.has_message) f.evidence.push_back({a.line, a.api_name + " without a message", {}});
  }
  if (f.evidence.empty()) return {};
  return {std::move(f)};
}

std::vector<SmellFinding> detect_general_fixture(const TestClassInfo& cls) {
  SmellFinding f{SmellKind::GF, class_id(cls), cls.file, {}, Confidence::Definite};
  for (const auto& field : cls.fixture.assigned_fields) {
    const auto line_it = cls.fixture.assignment_lines.find(field);
    const int line = line_it == cls.fixture.assignment_lines.end() ? 0 : line_it->second;
    for (const auto& test : cls.tests) {
      if (test.fixture_fields_read.contains(field)) continue;
      f.evidence.push_back({line, "fixture field " + field + " is not used by " + test.name, test.id});
    }
  }
  if (f.evidence.empty()) return {};
  return {std::move(f)};
}

std::vector<SmellFinding> detect_sensitive_equality(const TestMethodInfo& test) {
  SmellFinding f{SmellKind::SE, test.id, test.file, {}, Confidence::Definite};
  for (const auto& a : test.assertions) {
    if (a.compares_text_representation) {
      f.evidence.push_back({a.line, a.api_name + " compares ToString() output", {}});
    }
  }
  if (f.evidence.empty()) return {};
  return {std::move(f)};
}

std::vector<SmellFinding> detect_eager_test(const TestMethodInfo& test, bool requires_assertion) {
  SmellFinding f{SmellKind::ET, test.id, test.file, {}, Confidence::Definite};
  for (const auto& call : test.production_calls) {
    if (requires_assertion && !call.asserted) continue;
    f.evidence.push_back({call.line, "calls production method " + call.identity, {}});
    if (call.ambiguous) f.confidence = Confidence::Heuristic;
  }
  if (f.evidence.size() <= 1) return {};
  return {std::move(f)};
}

std::vector<SmellFinding> detect_lazy_test(const TestClassInfo& cls) {
  std::vector<SmellFinding> out;
  for (std::size_t i = 0; i < cls.tests.size(); ++i) {
    const auto& test = cls.tests[i];
    SmellFinding f{SmellKind::LT, test.id, test.file, {}, Confidence::Definite};
    for (std::size_t j = 0; j < cls.tests.size(); ++j) {
      if (i == j) continue;
      const auto& peer = cls.tests[j];
      for (const auto& call : test.production_calls) {
        const bool shared = std::any_of(peer.production_calls.begin(), peer.production_calls.end(),
                                        [&](const ProductionCall& c) { return c.identity == call.identity; });
        if (!shared) continue;
        f.evidence.push_back({call.line, "shares production method " + call.identity + " with " + peer.name,
                              peer.id});
        if (call.ambiguous) f.confidence = Confidence::Heuristic;
      }
    }
    if (!f.evidence.empty()) out.push_back(std::move(f));
  }
  return out;
}

std::vector<SmellFinding> detect_mystery_guest(const TestMethodInfo& test, const FixtureInfo& fixture) {
  SmellFinding f{SmellKind::MG, test.id, test.file, {}, Confidence::Heuristic};
  for (const auto& signal : test.resource_signals) {
    if (test.mock_objects.contains(signal.subject) || fixture.mock_objects.contains(signal.subject)) {
      continue;
    }
    f.evidence.push_back({signal.line,
                          "external resource via " + signal.subject + " (" + signal.source +
                              " matches " + signal.pattern + ")",
                          {}});
  }
  if (f.evidence.empty()) return {};
  return {std::move(f)};
}

std::vector<SmellFinding> detect_smells(const std::vector<TestClassInfo>& classes, const Config& config) {
  std::vector<SmellFinding> out;
  auto append = [&](std::vector<SmellFinding> found) {
    std::move(found.begin(), found.end(), std::back_inserter(out));
  };
  for (const auto& cls : classes) {
    for (const auto& test : cls.tests) {
      append(detect_assertion_roulette(test));
      append(detect_sensitive_equality(test));
      append(detect_eager_test(test, config.eager_requires_assertion));
      append(detect_mystery_guest(test, cls.fixture));
    }
    append(detect_general_fixture(cls));
    append(detect_lazy_test(cls));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> implicated_tests(const SmellFinding& finding) {
  if (finding.kind != SmellKind::GF) return {finding.subject};
  std::set<std::string> tests;
  for (const auto& e : finding.evidence) tests.insert(e.related);
  return {tests.begin(), tests.end()};
}

SmellSummary smell_summary(const std::vector<SmellFinding>& findings, int test_count) {
  SmellSummary s;
  std::map<SmellKind, std::set<std::string>> by_kind;
  for (const auto kind : kAllSmells) {
    s.counts[kind] = 0;
    by_kind[kind];
  }
  std::set<std::string> smelly;
  for (const auto& f : findings) {
    ++s.counts[f.kind];
    for (auto& t : implicated_tests(f)) {
      by_kind[f.kind].insert(t);
      smelly.insert(std::move(t));
    }
  }
  for (const auto& [kind, tests] : by_kind) {
    s.test_fractions[kind] =
        test_count == 0 ? 0.0 : std::min(1.0, static_cast<double>(tests.size()) / test_count);
  }
  s.test_count = test_count;
  s.no_tests = test_count == 0;
  s.smelly_tests = static_cast<int>(smelly.size());
  s.smelly_test_fraction =
      test_count == 0 ? 0.0 : std::min(1.0, static_cast<double>(s.smelly_tests) / test_count);
  return s;
}

}  // namespace vrtestlint
