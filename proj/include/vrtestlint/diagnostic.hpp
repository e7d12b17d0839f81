#pragma once

#include <string>
#include <string_view>

namespace vrtestlint {

enum class Severity { Note, Warning, Error, Fatal };

std::string_view to_string(Severity severity);
Severity severity_from_string(std::string_view text);

/// A non-fatal finding about the input (encoding, recovery, unresolved names).
/// Fatal means the whole file was dropped from the analysis.
struct Diagnostic {
  std::string file;
  int line = 0;
  Severity severity = Severity::Warning;
  std::string message;

  bool operator==(const Diagnostic&) const = default;
};

}  // namespace vrtestlint
