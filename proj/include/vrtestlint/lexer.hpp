#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "vrtestlint/diagnostic.hpp"

namespace vrtestlint {

enum class TokenKind : std::uint8_t {
  Identifier,
  Keyword,
  StringLiteral,       // regular, verbatim, raw and character literals
  InterpolatedString,  // $"..." in all its variants, holes included
  Number,
  Punctuation,
  Comment,             // line, block and preprocessor directive lines
  Whitespace,          // includes a leading byte-order mark
  AttributeBracket,    // '[' / ']' delimiting an attribute section
};

std::string_view to_string(TokenKind kind);

/// One lexeme. `text` borrows from the buffer passed to tokenize().
struct Token {
  TokenKind kind = TokenKind::Punctuation;
  std::string_view text;
  std::size_t offset = 0;
  int line = 1;    // 1-based
  int column = 1;  // 1-based, in bytes

  [[nodiscard]] bool is_trivia() const {
    return kind == TokenKind::Whitespace || kind == TokenKind::Comment;
  }
  [[nodiscard]] bool is(std::string_view punct) const {
    return (kind == TokenKind::Punctuation || kind == TokenKind::AttributeBracket) &&
           text == punct;
  }
  [[nodiscard]] bool is_keyword(std::string_view kw) const {
    return kind == TokenKind::Keyword && text == kw;
  }
  [[nodiscard]] bool is_identifier(std::string_view name) const {
    return kind == TokenKind::Identifier && text == name;
  }
};

struct LexResult {
  std::vector<Token> tokens;
  std::vector<Diagnostic> diagnostics;
  /// False when the input is not UTF-8. Tokens are still produced (and still
  /// round-trip), but callers are expected to drop the unit.
  bool encoding_ok = true;
};

/// Returns the offset of the first byte that breaks UTF-8 well-formedness, or
/// npos when the whole buffer is valid.
std::size_t find_invalid_utf8(std::string_view bytes);

/// Lossless C# lexer: concatenating the token texts reproduces `source`
/// byte-for-byte. Never throws on arbitrary input.
LexResult tokenize(std::string_view source);

bool is_csharp_keyword(std::string_view word);

}  // namespace vrtestlint
