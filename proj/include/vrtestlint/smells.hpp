#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vrtestlint/config.hpp"
#include "vrtestlint/test_model.hpp"

namespace vrtestlint {

enum class SmellKind { AR, GF, SE, ET, LT, MG };

inline constexpr SmellKind kAllSmells[] = {SmellKind::AR, SmellKind::GF, SmellKind::SE,
                                           SmellKind::ET, SmellKind::LT, SmellKind::MG};

std::string_view to_string(SmellKind kind);
std::optional<SmellKind> smell_from_string(std::string_view text);

enum class Confidence { Definite, Heuristic };

std::string_view to_string(Confidence confidence);
std::optional<Confidence> confidence_from_string(std::string_view text);

struct Evidence {
  int line = 0;
  std::string text;
  std::string related;  // GF: the test not reading the field; LT: the peer test

  auto operator<=>(const Evidence&) const = default;
};

struct SmellFinding {
  SmellKind kind = SmellKind::AR;
  std::string subject;  // test id, or "<file>::<Class>" for GF
  std::string file;
  std::vector<Evidence> evidence;
  Confidence confidence = Confidence::Definite;

  auto operator<=>(const SmellFinding&) const = default;
};

struct SmellSummary {
  std::map<SmellKind, int> counts;           // findings per kind, every kind present
  std::map<SmellKind, double> test_fractions; // share of tests implicated per kind
  int test_count = 0;
  int smelly_tests = 0;
  double smelly_test_fraction = 0.0;
  bool no_tests = true;

  bool operator==(const SmellSummary&) const = default;
};

std::string class_id(const TestClassInfo& cls);

std::vector<SmellFinding> detect_assertion_roulette(const TestMethodInfo& test);
std::vector<SmellFinding> detect_general_fixture(const TestClassInfo& cls);
std::vector<SmellFinding> detect_sensitive_equality(const TestMethodInfo& test);
/// With `requires_assertion`, only production calls whose result reaches an
/// assertion are counted.
std::vector<SmellFinding> detect_eager_test(const TestMethodInfo& test, bool requires_assertion = false);
std::vector<SmellFinding> detect_lazy_test(const TestClassInfo& cls);
std::vector<SmellFinding> detect_mystery_guest(const TestMethodInfo& test, const FixtureInfo& fixture);

/// All six detectors over every class; findings sorted.
std::vector<SmellFinding> detect_smells(const std::vector<TestClassInfo>& classes, const Config& config);

/// Tests implicated by `finding`: the subject, or for GF the tests named in evidence.
std::vector<std::string> implicated_tests(const SmellFinding& finding);

SmellSummary smell_summary(const std::vector<SmellFinding>& findings, int test_count);

}  // namespace vrtestlint
