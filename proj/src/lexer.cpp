#include "vrtestlint/lexer.hpp"

#include <algorithm>
#include <array>
#include <string>
#include <unordered_set>

namespace vrtestlint {

std::string_view to_string(TokenKind kind) {
  switch (kind) {
    case TokenKind::Identifier: return "identifier";
    case TokenKind::Keyword: return "keyword";
    case TokenKind::StringLiteral: return "string-literal";
    case TokenKind::InterpolatedString: return "interpolated-string";
    case TokenKind::Number: return "number";
    case TokenKind::Punctuation: return "punctuation";
    case TokenKind::Comment: return "comment";
    case TokenKind::Whitespace: return "whitespace";
    case TokenKind::AttributeBracket: return "attribute-bracket";
  }
  return "unknown";
}

bool is_csharp_keyword(std::string_view word) {
  static const std::unordered_set<std::string_view> kKeywords = {
      "abstract", "as",       "base",      "bool",      "break",     "byte",     "case",
      "catch",    "char",     "checked",   "class",     "const",     "continue", "decimal",
      "default",  "delegate", "do",        "double",    "else",      "enum",     "event",
      "explicit", "extern",   "false",     "finally",   "fixed",     "float",    "for",
      "foreach",  "goto",     "if",        "implicit",  "in",        "int",      "interface",
      "internal", "is",       "lock",      "long",      "namespace", "new",      "null",
      "object",   "operator", "out",       "override",  "params",    "private",  "protected",
      "public",   "readonly", "ref",       "return",    "sbyte",     "sealed",   "short",
      "sizeof",   "stackalloc", "static",  "string",    "struct",    "switch",   "this",
      "throw",    "true",     "try",       "typeof",    "uint",      "ulong",    "unchecked",
      "unsafe",   "ushort",   "using",     "virtual",   "void",      "volatile", "while",
  };
  return kKeywords.contains(word);
}

std::size_t find_invalid_utf8(std::string_view bytes) {
  const auto n = bytes.size();
  std::size_t i = 0;
  while (i < n) {
    const auto c = static_cast<unsigned char>(bytes[i]);
    if (c < 0x80) {
      ++i;
      continue;
    }
    std::size_t len = 0;
    std::uint32_t cp = 0;
    if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else {
      return i;
    }
    if (i + len > n) return i;
    for (std::size_t k = 1; k < len; ++k) {
      const auto cc = static_cast<unsigned char>(bytes[i + k]);
      if ((cc & 0xC0) != 0x80) return i;
      cp = (cp << 6) | (cc & 0x3F);
    }
    // Overlong forms, surrogates and out-of-range code points.
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) ||
        (cp >= 0xD800 && cp <= 0xDFFF) || cp > 0x10FFFF) {
      return i;
    }
    i += len;
  }
  return std::string_view::npos;
}

namespace {

constexpr std::size_t kMaxLiteralNesting = 64;

bool is_ident_start(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c >= 0x80;
}
bool is_ident_part(unsigned char c) {
  return is_ident_start(c) || (c >= '0' && c <= '9');
}
bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }
bool is_hex(unsigned char c) {
  return is_digit(c) || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}
bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
}

// Multi-character operators, longest first.
constexpr std::array<std::string_view, 25> kOperators = {
    "?\?=", "...", "=>", "==", "!=", "<=", ">=", "&&", "||", "++", "--", "+=", "-=",
    "*=",  "/=",  "%=", "&=", "|=", "^=", "??", "?.", "::", "->", "..", "<<",
};

constexpr std::string_view kSinglePunct = "{}()[];,.:+-*/%&|^!~=<>?";

struct LiteralEnd {
  std::size_t end = 0;
  bool terminated = true;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  LexResult run() {
    LexResult result;
    if (const auto bad = find_invalid_utf8(src_); bad != std::string_view::npos) {
      result.encoding_ok = false;
      diags_.push_back({{}, line_of(bad), Severity::Fatal,
                        "input is not valid UTF-8 (first bad byte at offset " +
                            std::to_string(bad) + ")"});
    }
    if (src_.starts_with("\xEF\xBB\xBF")) emit(TokenKind::Whitespace, 3);
    while (pos_ < src_.size()) step();
    result.tokens = std::move(tokens_);
    result.diagnostics = std::move(diags_);
    return result;
  }

 private:
  [[nodiscard]] unsigned char at(std::size_t p) const {
    return p < src_.size() ? static_cast<unsigned char>(src_[p]) : 0;
  }

  int line_of(std::size_t offset) const {
    return 1 + static_cast<int>(std::count(src_.begin(),
                                           src_.begin() + static_cast<std::ptrdiff_t>(offset),
                                           '\n'));
  }

  void emit(TokenKind kind, std::size_t length) {
    const auto text = src_.substr(pos_, length);
    tokens_.push_back({kind, text, pos_, line_, column_});
    for (const char c : text) {
      if (c == '\n') {
        ++line_;
        column_ = 1;
        at_line_start_ = true;
      } else {
        ++column_;
      }
    }
    if (kind != TokenKind::Whitespace) at_line_start_ = false;
    if (kind != TokenKind::Whitespace && kind != TokenKind::Comment) {
      prev_significant_ = tokens_.size() - 1;
    }
    pos_ += length;
  }

  void warn(Severity severity, std::string message) {
    diags_.push_back({{}, line_, severity, std::move(message)});
  }

  void step() {
    const unsigned char c = at(pos_);
    if (is_space(c)) {
      auto q = pos_;
      while (q < src_.size() && is_space(at(q))) ++q;
      emit(TokenKind::Whitespace, q - pos_);
      return;
    }
    // U+00A0 and U+FEFF are whitespace to the C# lexer as well.
    if ((c == 0xC2 && at(pos_ + 1) == 0xA0)) {
      emit(TokenKind::Whitespace, 2);
      return;
    }
    if (c == 0xEF && at(pos_ + 1) == 0xBB && at(pos_ + 2) == 0xBF) {
      emit(TokenKind::Whitespace, 3);
      return;
    }
    if (c == '#' && at_line_start_) {
      emit(TokenKind::Comment, line_end(pos_) - pos_);
      return;
    }
    if (c == '/' && at(pos_ + 1) == '/') {
      emit(TokenKind::Comment, line_end(pos_) - pos_);
      return;
    }
    if (c == '/' && at(pos_ + 1) == '*') {
      const auto close = src_.find("*/", pos_ + 2);
      if (close == std::string_view::npos) {
        warn(Severity::Error, "unterminated block comment");
        emit(TokenKind::Comment, src_.size() - pos_);
      } else {
        emit(TokenKind::Comment, close + 2 - pos_);
      }
      return;
    }
    if (starts_literal(pos_)) {
      const bool interpolated = c == '$' || (c == '@' && at(pos_ + 1) == '$');
      const auto lit = skip_literal(pos_, 0);
      if (!lit.terminated) warn(Severity::Error, "unterminated string or character literal");
      emit(interpolated ? TokenKind::InterpolatedString : TokenKind::StringLiteral,
           std::max<std::size_t>(lit.end, pos_ + 1) - pos_);
      return;
    }
    if (is_ident_start(c) || (c == '@' && is_ident_start(at(pos_ + 1)))) {
      auto q = pos_ + (c == '@' ? 1 : 0);
      while (q < src_.size() && is_ident_part(at(q))) ++q;
      const auto word = src_.substr(pos_, q - pos_);
      emit(c != '@' && is_csharp_keyword(word) ? TokenKind::Keyword : TokenKind::Identifier,
           q - pos_);
      return;
    }
    if (is_digit(c) || (c == '.' && is_digit(at(pos_ + 1)))) {
      emit(TokenKind::Number, number_end(pos_) - pos_);
      return;
    }
    lex_punctuation();
  }

  [[nodiscard]] std::size_t line_end(std::size_t p) const {
    const auto nl = src_.find('\n', p);
    return nl == std::string_view::npos ? src_.size() : nl;
  }

  [[nodiscard]] std::size_t number_end(std::size_t p) const {
    auto q = p;
    if (at(q) == '0' && (at(q + 1) == 'x' || at(q + 1) == 'X')) {
      q += 2;
      while (is_hex(at(q)) || at(q) == '_') ++q;
    } else if (at(q) == '0' && (at(q + 1) == 'b' || at(q + 1) == 'B')) {
      q += 2;
      while (at(q) == '0' || at(q) == '1' || at(q) == '_') ++q;
    } else {
      while (is_digit(at(q)) || at(q) == '_') ++q;
      if (at(q) == '.' && is_digit(at(q + 1))) {
        ++q;
        while (is_digit(at(q)) || at(q) == '_') ++q;
      }
      if ((at(q) == 'e' || at(q) == 'E') &&
          (is_digit(at(q + 1)) ||
           ((at(q + 1) == '+' || at(q + 1) == '-') && is_digit(at(q + 2))))) {
        q += 2;
        while (is_digit(at(q))) ++q;
      }
    }
    while (std::string_view("fFdDmMuUlL").find(static_cast<char>(at(q))) != std::string_view::npos &&
           at(q) != 0) {
      ++q;
    }
    return q;
  }

  [[nodiscard]] bool starts_literal(std::size_t p) const {
    const auto c = at(p);
    if (c == '"' || c == '\'') return true;
    if (c == '@') return at(p + 1) == '"' || (at(p + 1) == '$' && at(p + 2) == '"');
    if (c == '$') {
      auto q = p;
      while (at(q) == '$') ++q;
      return at(q) == '"' || (at(q) == '@' && at(q + 1) == '"');
    }
    return false;
  }

  // p points at the first byte of a literal recognised by starts_literal().
  LiteralEnd skip_literal(std::size_t p, std::size_t nesting) const {
    bool verbatim = false;
    bool interpolated = false;
    while (at(p) == '$' || at(p) == '@') {
      if (at(p) == '$') interpolated = true;
      if (at(p) == '@') verbatim = true;
      ++p;
    }
    if (at(p) == '\'') return skip_char(p);
    if (at(p) == '"' && at(p + 1) == '"' && at(p + 2) == '"') return skip_raw(p);
    if (interpolated && nesting < kMaxLiteralNesting) return skip_interpolated(p, verbatim, nesting);
    return verbatim ? skip_verbatim(p) : skip_regular(p);
  }

  [[nodiscard]] LiteralEnd skip_regular(std::size_t p) const {
    auto q = p + 1;
    while (q < src_.size()) {
      const auto ch = at(q);
      if (ch == '\\') {
        q += 2;
      } else if (ch == '"') {
        return {q + 1, true};
      } else if (ch == '\n') {
        return {q, false};
      } else {
        ++q;
      }
    }
    return {src_.size(), false};
  }

  [[nodiscard]] LiteralEnd skip_verbatim(std::size_t p) const {
    auto q = p + 1;
    while (q < src_.size()) {
      if (at(q) == '"') {
        if (at(q + 1) == '"') {
          q += 2;
          continue;
        }
        return {q + 1, true};
      }
      ++q;
    }
    return {src_.size(), false};
  }

  [[nodiscard]] LiteralEnd skip_raw(std::size_t p) const {
    std::size_t quotes = 0;
    while (at(p + quotes) == '"') ++quotes;
    auto q = p + quotes;
    while (q < src_.size()) {
      if (at(q) == '"') {
        std::size_t run = 0;
        while (at(q + run) == '"') ++run;
        if (run >= quotes) return {q + run, true};
        q += run;
      } else {
        ++q;
      }
    }
    return {src_.size(), false};
  }

  [[nodiscard]] LiteralEnd skip_char(std::size_t p) const {
    const auto limit = std::min(line_end(p), p + 12);
    for (auto q = p + 1; q < limit; ++q) {
      if (at(q) == '\\') {
        ++q;
        continue;
      }
      if (at(q) == '\'') return {q + 1, true};
    }
    return {p + 1, false};
  }

  [[nodiscard]] LiteralEnd skip_interpolated(std::size_t p, bool verbatim,
                                             std::size_t nesting) const {
    auto q = p + 1;
    while (q < src_.size()) {
      const auto ch = at(q);
      if (ch == '{') {
        if (at(q + 1) == '{') {
          q += 2;
          continue;
        }
        q = skip_hole(q + 1, nesting);
        continue;
      }
      if (ch == '"') {
        if (verbatim && at(q + 1) == '"') {
          q += 2;
          continue;
        }
        return {q + 1, true};
      }
      if (!verbatim && ch == '\\') {
        q += 2;
        continue;
      }
      if (!verbatim && ch == '\n') return {q, false};
      ++q;
    }
    return {src_.size(), false};
  }

  // Returns the offset just past the '}' closing an interpolation hole.
  [[nodiscard]] std::size_t skip_hole(std::size_t q, std::size_t nesting) const {
    int depth = 0;
    while (q < src_.size()) {
      const auto ch = at(q);
      if (starts_literal(q)) {
        const auto lit = skip_literal(q, nesting + 1);
        q = std::max(lit.end, q + 1);
        continue;
      }
      if (ch == '{') {
        ++depth;
      } else if (ch == '}') {
        if (depth == 0) return q + 1;
        --depth;
      } else if (ch == '"') {
        return q;  // closing quote of the enclosing literal
      }
      ++q;
    }
    return src_.size();
  }

  void lex_punctuation() {
    const auto rest = src_.substr(pos_);
    for (const auto op : kOperators) {
      if (rest.starts_with(op)) {
        emit(TokenKind::Punctuation, op.size());
        return;
      }
    }
    const char c = src_[pos_];
    if (kSinglePunct.find(c) == std::string_view::npos) {
      warn(Severity::Warning, std::string("unexpected character 0x") + hex_byte(c));
      emit(TokenKind::Punctuation, 1);
      return;
    }
    if (c == '[') {
      const bool attribute = opens_attribute();
      attribute_stack_.push_back(attribute);
      emit(attribute ? TokenKind::AttributeBracket : TokenKind::Punctuation, 1);
      return;
    }
    if (c == ']') {
      bool attribute = false;
      if (!attribute_stack_.empty()) {
        attribute = attribute_stack_.back();
        attribute_stack_.pop_back();
      }
      emit(attribute ? TokenKind::AttributeBracket : TokenKind::Punctuation, 1);
      return;
    }
    emit(TokenKind::Punctuation, 1);
  }

  [[nodiscard]] bool opens_attribute() const {
    if (prev_significant_ == kNone) return true;
    const auto& prev = tokens_[prev_significant_];
    if (prev.kind == TokenKind::AttributeBracket) return prev.text == "]";
    if (prev.kind != TokenKind::Punctuation) return false;
    return prev.text == "{" || prev.text == "}" || prev.text == ";" || prev.text == "(" ||
           prev.text == ",";
  }

  static std::string hex_byte(char c) {
    constexpr std::string_view digits = "0123456789ABCDEF";
    const auto u = static_cast<unsigned char>(c);
    return {digits[u >> 4], digits[u & 0xF]};
  }

  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
  bool at_line_start_ = true;
  std::size_t prev_significant_ = kNone;
  std::vector<bool> attribute_stack_;
  std::vector<Token> tokens_;
  std::vector<Diagnostic> diags_;
};

}  // namespace

LexResult tokenize(std::string_view source) { return Lexer(source).run(); }

}  // namespace vrtestlint
