#include "vrtestlint/loc.hpp"

#include <algorithm>

namespace vrtestlint {

int physical_line_count(std::string_view source) {
  if (source.empty()) return 0;
  const auto newlines = static_cast<int>(std::count(source.begin(), source.end(), '\n'));
  return source.back() == '\n' ? newlines : newlines + 1;
}

std::vector<LineKind> classify_lines(std::string_view source, std::span<const Token> tokens) {
  const int total = physical_line_count(source);
  std::vector<LineKind> lines(static_cast<std::size_t>(total), LineKind::Blank);
  for (const auto& token : tokens) {
    if (token.kind == TokenKind::Whitespace) continue;
    const int first = token.line;
    const int last = first + static_cast<int>(std::count(token.text.begin(), token.text.end(), '\n'));
    const auto kind = token.kind == TokenKind::Comment ? LineKind::Comment : LineKind::Code;
    for (int line = first; line <= last && line <= total; ++line) {
      auto& slot = lines[static_cast<std::size_t>(line - 1)];
      if (static_cast<int>(kind) > static_cast<int>(slot)) slot = kind;
    }
  }
  return lines;
}

LocStats summarize_lines(std::span<const LineKind> lines) {
  LocStats stats;
  stats.physical_lines = static_cast<int>(lines.size());
  for (const auto kind : lines) {
    switch (kind) {
      case LineKind::Blank: ++stats.blank_lines; break;
      case LineKind::Comment: ++stats.comment_lines; break;
      case LineKind::Code: ++stats.code_lines; break;
    }
  }
  return stats;
}

LocStats count_loc(std::string_view source) {
  const auto lexed = tokenize(source);
  return summarize_lines(classify_lines(source, lexed.tokens));
}

int count_code_lines(std::span<const LineKind> lines, int first_line, int last_line) {
  int count = 0;
  first_line = std::max(first_line, 1);
  last_line = std::min(last_line, static_cast<int>(lines.size()));
  for (int line = first_line; line <= last_line; ++line) {
    if (lines[static_cast<std::size_t>(line - 1)] == LineKind::Code) ++count;
  }
  return count;
}

}  // namespace vrtestlint
