#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "vrtestlint/lexer.hpp"

namespace vrtestlint {

enum class LineKind : std::uint8_t { Blank, Comment, Code };

/// physical_lines == blank_lines + comment_lines + code_lines always holds.
struct LocStats {
  int physical_lines = 0;
  int blank_lines = 0;
  int comment_lines = 0;
  int code_lines = 0;

  bool operator==(const LocStats&) const = default;
};

/// Classifies each physical line of the tokenized source. A line touched by any
/// non-trivia token is code, even when it also carries a comment; preprocessor
/// directives count as comments. Index 0 is line 1.
std::vector<LineKind> classify_lines(std::string_view source, std::span<const Token> tokens);

LocStats summarize_lines(std::span<const LineKind> lines);

LocStats count_loc(std::string_view source);

/// Code lines within [first_line, last_line] (1-based, inclusive).
int count_code_lines(std::span<const LineKind> lines, int first_line, int last_line);

int physical_line_count(std::string_view source);

}  // namespace vrtestlint
