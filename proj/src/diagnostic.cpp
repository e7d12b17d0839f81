#include "vrtestlint/diagnostic.hpp"

#include <stdexcept>
#include <string>

namespace vrtestlint {

std::string_view to_string(Severity severity) {
  switch (severity) {
    case Severity::Note: return "note";
    case Severity::Warning: return "warning";
    case Severity::Error: return "error";
    case Severity::Fatal: return "fatal";
  }
  return "warning";
}

Severity severity_from_string(std::string_view text) {
  if (text == "note") return Severity::Note;
  if (text == "warning") return Severity::Warning;
  if (text == "error") return Severity::Error;
  if (text == "fatal") return Severity::Fatal;
  throw std::invalid_argument("unknown severity: " + std::string(text));
}

}  // namespace vrtestlint
