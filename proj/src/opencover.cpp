#include <expat.h>

#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include "vrtestlint/metrics.hpp"

namespace vrtestlint {

namespace {

struct ModuleCounts {
  bool has_summary = false;
  bool skipped = false;
  long long summary_total = 0;
  long long summary_visited = 0;
  long long points = 0;
  long long visited_points = 0;
};

struct OpenCoverState {
  XML_Parser parser = nullptr;
  std::vector<std::string> stack;
  std::vector<ModuleCounts> modules;
  bool session_summary = false;
  long long session_total = 0;
  long long session_visited = 0;
  std::string error;

  void fail(const std::string& element, const std::string& message) {
    if (!error.empty()) return;
    error = "<" + element + "> at line " + std::to_string(XML_GetCurrentLineNumber(parser)) + ": " +
            message;
    XML_StopParser(parser, XML_FALSE);
  }
};

const char* find_attribute(const XML_Char** attrs, const char* name) {
  for (int i = 0; attrs[i] != nullptr; i += 2) {
    if (std::strcmp(attrs[i], name) == 0) return attrs[i + 1];
  }
  return nullptr;
}

bool parse_number(const char* text, long long& out) {
  if (text == nullptr || *text == '\0') return false;
  long long v = 0;
  for (const char* p = text; *p; ++p) {
    if (*p < '0' || *p > '9') return false;
    if (v > 1'000'000'000'000LL) return false;
    v = v * 10 + (*p - '0');
  }
  out = v;
  return true;
}

bool read_summary(OpenCoverState& st, const std::string& element, const XML_Char** attrs,
                  long long& total, long long& visited) {
  const char* num = find_attribute(attrs, "numSequencePoints");
  const char* vis = find_attribute(attrs, "visitedSequencePoints");
  if (!parse_number(num, total)) {
    st.fail(element, "missing or invalid numSequencePoints");
    return false;
  }
  if (!parse_number(vis, visited)) {
    st.fail(element, "missing or invalid visitedSequencePoints");
    return false;
  }
  if (visited > total) {
    st.fail(element, "visitedSequencePoints exceeds numSequencePoints");
    return false;
  }
  return true;
}

void XMLCALL on_start(void* data, const XML_Char* name, const XML_Char** attrs) {
  auto& st = *static_cast<OpenCoverState*>(data);
  const std::string element(name);
  const std::string parent = st.stack.empty() ? std::string() : st.stack.back();
  if (st.stack.empty() && element != "CoverageSession") {
    st.fail(element, "root element must be CoverageSession");
    return;
  }
  if (element == "Module") {
    ModuleCounts module;
    module.skipped = find_attribute(attrs, "skippedDueTo") != nullptr;
    st.modules.push_back(module);
  } else if (element == "Summary" && parent == "Module" && !st.modules.empty()) {
    auto& module = st.modules.back();
    if (read_summary(st, element, attrs, module.summary_total, module.summary_visited)) {
      module.has_summary = true;
    }
  } else if (element == "Summary" && parent == "CoverageSession") {
    if (read_summary(st, element, attrs, st.session_total, st.session_visited)) {
      st.session_summary = true;
    }
  } else if (element == "SequencePoint" && !st.modules.empty()) {
    long long vc = 0;
    if (!parse_number(find_attribute(attrs, "vc"), vc)) {
      st.fail(element, "missing or invalid vc");
      return;
    }
    auto& module = st.modules.back();
    ++module.points;
    if (vc > 0) ++module.visited_points;
  }
  st.stack.push_back(element);
}

void XMLCALL on_end(void* data, const XML_Char*) {
  auto& st = *static_cast<OpenCoverState*>(data);
  if (!st.stack.empty()) st.stack.pop_back();
}

}  // namespace

CoverageSummary parse_opencover_xml(std::string_view xml) {
  std::unique_ptr<XML_ParserStruct, decltype(&XML_ParserFree)> parser(XML_ParserCreate(nullptr),
                                                                      &XML_ParserFree);
  if (!parser) throw CoverageError("cannot allocate XML parser");
  OpenCoverState st;
  st.parser = parser.get();
  XML_SetUserData(parser.get(), &st);
  XML_SetElementHandler(parser.get(), on_start, on_end);
  const auto status = XML_Parse(parser.get(), xml.data(), static_cast<int>(xml.size()), XML_TRUE);
  if (!st.error.empty()) throw CoverageError("OpenCover report: " + st.error);
  if (status != XML_STATUS_OK) {
    const std::string element = st.stack.empty() ? std::string("document") : st.stack.back();
    throw CoverageError("OpenCover report: <" + element + "> at line " +
                        std::to_string(XML_GetCurrentLineNumber(parser.get())) + ": " +
                        XML_ErrorString(XML_GetErrorCode(parser.get())));
  }
  long long total = 0;
  long long visited = 0;
  bool any_module = false;
  for (const auto& m : st.modules) {
    if (m.skipped) continue;
    any_module = true;
    if (m.has_summary) {
      total += m.summary_total;
      visited += m.summary_visited;
    } else {
      total += m.points;
      visited += m.visited_points;
    }
  }
  if (!any_module && st.session_summary) {
    total = st.session_total;
    visited = st.session_visited;
  }
  CoverageSummary s;
  s.covered_lines = visited;
  s.coverable_lines = total;
  s.no_coverable_code = total == 0;
  s.percentage = compute_coverage_percentage(s);
  return s;
}

}  // namespace vrtestlint
