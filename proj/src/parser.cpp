#include "vrtestlint/parser.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <unordered_set>
#include <utility>

namespace vrtestlint {
namespace {

constexpr std::size_t kNpos = static_cast<std::size_t>(-1);
constexpr int kMaxNesting = 200;

const std::unordered_set<std::string_view>& modifier_keywords() {
  static const std::unordered_set<std::string_view> set = {
      "public",  "private", "protected", "internal", "static",   "abstract", "sealed",
      "unsafe",  "readonly", "new",      "virtual",  "override", "extern",   "const",
      "volatile", "fixed",  "ref",
  };
  return set;
}

// Contextual modifiers only count as such when followed by another word.
const std::unordered_set<std::string_view>& contextual_modifiers() {
  static const std::unordered_set<std::string_view> set = {"partial", "async", "file",
                                                           "required", "scoped"};
  return set;
}

const std::unordered_set<std::string_view>& builtin_types() {
  static const std::unordered_set<std::string_view> set = {
      "bool",  "byte",  "char",   "decimal", "double", "float", "int",    "long",
      "object", "sbyte", "short", "string",  "uint",   "ulong", "ushort", "void",
  };
  return set;
}

// Identifiers that can precede '(' without naming a call target or a type.
const std::unordered_set<std::string_view>& non_call_words() {
  static const std::unordered_set<std::string_view> set = {"nameof", "var", "when"};
  return set;
}

// Contextual words after which `Name(` is still a call, not a declaration.
const std::unordered_set<std::string_view>& expression_context_words() {
  static const std::unordered_set<std::string_view> set = {
      "await", "yield", "when", "select", "where", "from", "orderby", "into", "let",
      "on",    "equals", "by",  "ascending", "descending", "group", "join", "and",
      "or",    "not",   "with",
  };
  return set;
}

bool is_type_keyword(const Token& t) {
  return t.is_keyword("class") || t.is_keyword("struct") || t.is_keyword("interface") ||
         t.is_keyword("enum");
}

bool is_access_keyword(const Token& t) {
  return t.is_keyword("public") || t.is_keyword("private") || t.is_keyword("protected") ||
         t.is_keyword("internal");
}

bool is_word(const Token& t) {
  return t.kind == TokenKind::Identifier || t.kind == TokenKind::Keyword;
}

std::string strip_verbatim(std::string_view name) {
  if (!name.empty() && name.front() == '@') name.remove_prefix(1);
  return std::string(name);
}

bool is_assignment_op(const Token& t) {
  if (t.kind != TokenKind::Punctuation) return false;
  const auto s = t.text;
  return s == "=" || s == "+=" || s == "-=" || s == "*=" || s == "/=" || s == "%=" ||
         s == "&=" || s == "|=" || s == "^=" || s == "?\?=";
}

class Parser {
 public:
  Parser(std::span<const Token> tokens, std::string_view path) : toks_(tokens) {
    unit_.path = std::string(path);
    if (!toks_.empty()) {
      const auto* begin = toks_.front().text.data();
      const auto& last = toks_.back();
      src_ = std::string_view(begin, static_cast<std::size_t>(last.text.data() - begin) +
                                         last.text.size());
    }
    for (std::size_t i = 0; i < toks_.size(); ++i) {
      if (!toks_[i].is_trivia()) sig_.push_back(i);
    }
    eof_.kind = TokenKind::Whitespace;
    eof_.offset = src_.size();
    eof_.line = toks_.empty() ? 1 : toks_.back().line;
    match_brackets();
  }

  SyntaxUnit run() {
    unit_.lines = classify_lines(src_, toks_);
    unit_.loc = summarize_lines(unit_.lines);
    parse_namespace_body("", false);
    claim(RegionKind::Opaque, sig_.size());
    finalize_body_loc(unit_.declarations);
    return std::move(unit_);
  }

 private:
  // ---- token access -------------------------------------------------------

  [[nodiscard]] const Token& t(std::size_t k) const {
    return k < sig_.size() ? toks_[sig_[k]] : eof_;
  }
  [[nodiscard]] bool at_end() const { return k_ >= sig_.size(); }
  [[nodiscard]] bool is(std::size_t k, std::string_view punct) const {
    return k < sig_.size() && t(k).is(punct);
  }
  [[nodiscard]] int line(std::size_t k) const { return t(k).line; }
  [[nodiscard]] int last_line_of(std::size_t k) const {
    const auto& tok = t(k);
    return tok.line + static_cast<int>(std::count(tok.text.begin(), tok.text.end(), '\n'));
  }

  // Source text of significant tokens [a, b).
  [[nodiscard]] std::string_view text(std::size_t a, std::size_t b) const {
    b = std::min(b, sig_.size());
    if (a >= b) return {};
    const auto begin = t(a).offset;
    const auto end = t(b - 1).offset + t(b - 1).text.size();
    return src_.substr(begin, end - begin);
  }
  [[nodiscard]] ByteSpan bytes(std::size_t a, std::size_t b) const {
    b = std::min(b, sig_.size());
    if (a >= b) return {t(a).offset, t(a).offset};
    return {t(a).offset, t(b - 1).offset + t(b - 1).text.size()};
  }

  void diag(int at_line, Severity severity, std::string message) {
    unit_.diagnostics.push_back({unit_.path, at_line, severity, std::move(message)});
  }

  // Assigns significant tokens [claimed_, upto) to one region.
  void claim(RegionKind kind, std::size_t upto) {
    upto = std::min(upto, sig_.size());
    if (upto <= claimed_) return;
    unit_.regions.push_back({kind, bytes(claimed_, upto)});
    claimed_ = upto;
  }

  // ---- bracket matching ---------------------------------------------------

  static char closer_for(std::string_view open) {
    if (open == "(") return ')';
    if (open == "[") return ']';
    if (open == "{") return '}';
    return 0;
  }

  void match_brackets() {
    match_.assign(sig_.size(), kNpos);
    std::vector<std::size_t> stack;
    for (std::size_t k = 0; k < sig_.size(); ++k) {
      const auto& tok = t(k);
      if (tok.kind != TokenKind::Punctuation && tok.kind != TokenKind::AttributeBracket) continue;
      if (tok.text == "(" || tok.text == "[" || tok.text == "{") {
        stack.push_back(k);
        continue;
      }
      if (tok.text != ")" && tok.text != "]" && tok.text != "}") continue;
      const char want = tok.text[0];
      auto it = std::find_if(stack.rbegin(), stack.rend(),
                             [&](std::size_t o) { return closer_for(t(o).text) == want; });
      if (it == stack.rend()) continue;  // stray closer
      const auto opener = *it;
      stack.erase(std::next(it).base(), stack.end());
      match_[opener] = k;
      match_[k] = opener;
    }
  }

  // Index of the bracket matching the one at k, or kNpos.
  [[nodiscard]] std::size_t partner(std::size_t k) const {
    return k < match_.size() ? match_[k] : kNpos;
  }

  [[nodiscard]] bool is_opener(std::size_t k) const {
    return is(k, "(") || is(k, "[") || is(k, "{");
  }
  [[nodiscard]] bool is_closer(std::size_t k) const {
    return is(k, ")") || is(k, "]") || is(k, "}");
  }

  // Index just past the group opened at k (end of input when unclosed).
  [[nodiscard]] std::size_t skip_group(std::size_t k) const {
    const auto close = partner(k);
    return close == kNpos ? sig_.size() : close + 1;
  }

  // Index of matching '>' for '<' at k when the span looks like type arguments.
  [[nodiscard]] std::size_t match_angle(std::size_t k, std::size_t limit) const {
    int depth = 0;
    for (auto j = k; j < limit && j < sig_.size(); ++j) {
      const auto& tok = t(j);
      if (tok.is("<")) {
        ++depth;
      } else if (tok.is(">")) {
        if (--depth == 0) return j;
      } else if (tok.is("(")) {
        const auto close = partner(j);
        if (close == kNpos) return kNpos;
        j = close;
      } else if (!(is_word(tok) || tok.is(",") || tok.is(".") || tok.is("?") || tok.is("[") ||
                   tok.is("]") || tok.is("*") || tok.is("::"))) {
        return kNpos;
      }
    }
    return kNpos;
  }

  // Index of matching '<'/'>' pair end when '<' at k opens type arguments in
  // an expression context (disambiguated by the token after '>').
  [[nodiscard]] std::size_t generic_close(std::size_t k, std::size_t limit) const {
    if (k == 0 || t(k - 1).kind != TokenKind::Identifier) return kNpos;
    const auto gt = match_angle(k, limit);
    if (gt == kNpos) return kNpos;
    const auto& next = t(gt + 1);
    if (gt + 1 >= sig_.size() || next.is("(") || next.is(")") || next.is("]") || next.is(",") ||
        next.is(".") || next.is("?.") || next.is(";") || next.is("{") || next.is("}") ||
        next.is("?") || next.is("=>") || next.is(":") || next.is("[")) {
      return gt;
    }
    return kNpos;
  }

  // Index of matching '<' for '>' at k, scanning backwards no further than floor.
  [[nodiscard]] std::size_t match_angle_back(std::size_t k, std::size_t floor) const {
    int depth = 0;
    for (auto j = k + 1; j-- > floor;) {
      const auto& tok = t(j);
      if (tok.is(">")) {
        ++depth;
      } else if (tok.is("<")) {
        if (--depth == 0) return j;
      } else if (tok.is(")")) {
        const auto open = partner(j);
        if (open == kNpos || open < floor) return kNpos;
        j = open;
      } else if (!(is_word(tok) || tok.is(",") || tok.is(".") || tok.is("?") || tok.is("[") ||
                   tok.is("]") || tok.is("*") || tok.is("::"))) {
        return kNpos;
      }
    }
    return kNpos;
  }

  // ---- declarations -------------------------------------------------------

  [[nodiscard]] bool is_modifier_at(std::size_t k) const {
    const auto& tok = t(k);
    if (tok.kind == TokenKind::Keyword) return modifier_keywords().contains(tok.text);
    if (tok.kind == TokenKind::Identifier && contextual_modifiers().contains(tok.text)) {
      return is_word(t(k + 1));
    }
    return false;
  }

  [[nodiscard]] bool is_record_at(std::size_t k) const {
    if (!t(k).is_identifier("record")) return false;
    const auto& next = t(k + 1);
    if (next.is_keyword("class") || next.is_keyword("struct")) return true;
    return next.kind == TokenKind::Identifier &&
           (is(k + 2, "(") || is(k + 2, "{") || is(k + 2, ":") || is(k + 2, "<") ||
            is(k + 2, ";"));
  }

  [[nodiscard]] bool at_type_start() const {
    return is_type_keyword(t(k_)) || is_record_at(k_);
  }

  std::vector<AttributeUse> parse_attributes() {
    std::vector<AttributeUse> out;
    while (!at_end() && is(k_, "[")) {
      const auto close = partner(k_);
      const auto end = close == kNpos ? sig_.size() : close;
      if (close == kNpos) diag(line(k_), Severity::Error, "unterminated attribute section");
      auto j = k_ + 1;
      // Optional target such as `assembly:` or `return:`.
      if (is_word(t(j)) && is(j + 1, ":")) j += 2;
      while (j < end) {
        const auto start = j;
        std::string name;
        while (j < end && !is(j, ",") && !is(j, "(")) {
          if (t(j).kind == TokenKind::Identifier || t(j).kind == TokenKind::Keyword) {
            name = strip_verbatim(t(j).text);
          }
          if (is(j, "<")) {
            const auto gt = match_angle(j, end);
            if (gt != kNpos) j = gt;
          }
          ++j;
        }
        AttributeUse use;
        if (name.size() > 9 && name.ends_with("Attribute")) name.resize(name.size() - 9);
        use.name = std::move(name);
        use.line = line(start);
        if (j < end && is(j, "(")) {
          const auto after = skip_group(j);
          use.arguments = std::string(text(j + 1, std::min(after, end + 1) - 1));
          j = std::min(after, end);
        }
        if (!use.name.empty()) out.push_back(std::move(use));
        while (j < end && !is(j, ",")) ++j;
        if (j < end) ++j;
      }
      k_ = std::min(end + 1, sig_.size());
      claim(RegionKind::Attribute, k_);
    }
    return out;
  }

  std::vector<std::string> parse_modifiers() {
    std::vector<std::string> mods;
    while (!at_end() && is_modifier_at(k_)) {
      // `new` followed by a type name at member level is a modifier; `new(`
      // never appears here.
      mods.emplace_back(t(k_).text);
      ++k_;
    }
    return mods;
  }

  // Skips an unrecognised construct: up to and including the next ';' at
  // depth 0, or through one balanced {...} group, whichever comes first.
  void skip_construct(std::size_t limit_close) {
    while (!at_end() && k_ != limit_close) {
      if (is(k_, ";")) {
        ++k_;
        return;
      }
      if (is(k_, "{")) {
        k_ = skip_group(k_);
        if (is(k_, ";")) ++k_;
        return;
      }
      if (is_opener(k_)) {
        k_ = skip_group(k_);
        continue;
      }
      if (is_closer(k_)) return;
      ++k_;
    }
  }

  void parse_namespace_body(const std::string& ns, bool braced) {
    std::string current_ns = ns;
    while (true) {
      if (at_end()) {
        if (braced) diag(eof_.line, Severity::Error, "missing '}' for namespace " + ns);
        return;
      }
      const auto start = k_;
      if (is(k_, "}")) {
        ++k_;
        if (braced) {
          claim(RegionKind::Brace, k_);
          return;
        }
        diag(line(start), Severity::Error, "unmatched '}'");
        claim(RegionKind::Stray, k_);
        continue;
      }
      if (is(k_, ")") || is(k_, "]")) {
        diag(line(k_), Severity::Error, std::string("unmatched '") + std::string(t(k_).text) + "'");
        ++k_;
        claim(RegionKind::Stray, k_);
        continue;
      }
      if (t(k_).is_keyword("using") || (t(k_).is_identifier("global") && t(k_ + 1).is_keyword("using"))) {
        parse_using_directive();
        continue;
      }
      if (t(k_).is_identifier("extern") || t(k_).is_keyword("extern")) {
        if (t(k_ + 1).is_identifier("alias")) {
          skip_construct(kNpos);
          claim(RegionKind::Directive, k_);
          continue;
        }
      }
      if (t(k_).is_keyword("namespace")) {
        auto j = k_ + 1;
        std::string name;
        while (j < sig_.size() && !is(j, "{") && !is(j, ";") && !is(j, "}")) {
          name += t(j).text;
          ++j;
        }
        const auto qualified = current_ns.empty() ? name : current_ns + "." + name;
        if (is(j, "{")) {
          k_ = j + 1;
          claim(RegionKind::Directive, k_);
          parse_namespace_body(qualified, true);
        } else {
          k_ = std::min(j + 1, sig_.size());
          claim(RegionKind::Directive, k_);
          current_ns = qualified;
        }
        continue;
      }
      auto attrs = parse_attributes();
      const auto decl_start = start;
      auto mods = parse_modifiers();
      if (at_type_start()) {
        unit_.declarations.push_back(parse_type(current_ns, std::move(attrs), std::move(mods), decl_start));
        continue;
      }
      if (at_end()) continue;
      if (t(k_).is_keyword("delegate")) {
        skip_construct(kNpos);
        claim(RegionKind::Member, k_);
        continue;
      }
      if (k_ == start || !attrs.empty() || !mods.empty()) {
        diag(line(k_), Severity::Warning, "unrecognized top-level construct skipped");
        const auto before = k_;
        skip_construct(kNpos);
        if (k_ == before) ++k_;
        claim(RegionKind::Opaque, k_);
      }
    }
  }

  void parse_using_directive() {
    auto j = k_;
    if (t(j).is_identifier("global")) ++j;
    ++j;  // using
    const auto body_start = j;
    while (j < sig_.size() && !is(j, ";") && !is(j, "{") && !is(j, "}")) ++j;
    unit_.usings.emplace_back(text(body_start, j));
    k_ = is(j, ";") ? j + 1 : j;
    if (k_ == body_start - 1) ++k_;
    claim(RegionKind::Directive, k_);
  }

  TypeDecl parse_type(const std::string& ns, std::vector<AttributeUse> attrs,
                      std::vector<std::string> mods, std::size_t decl_start) {
    TypeDecl type;
    type.namespace_name = ns;
    type.attributes = std::move(attrs);
    type.modifiers = std::move(mods);
    type.span.first = line(decl_start);
    if (t(k_).is_identifier("record")) {
      type.is_record = true;
      ++k_;
      if (t(k_).is_keyword("struct")) {
        type.kind = TypeKind::Struct;
        ++k_;
      } else if (t(k_).is_keyword("class")) {
        ++k_;
      }
    } else {
      const auto& kw = t(k_);
      type.kind = kw.is_keyword("class")    ? TypeKind::Class
                  : kw.is_keyword("struct") ? TypeKind::Struct
                  : kw.is_keyword("enum")   ? TypeKind::Enum
                                            : TypeKind::Interface;
      ++k_;
    }
    if (t(k_).kind == TokenKind::Identifier) {
      type.name = strip_verbatim(t(k_).text);
      ++k_;
    } else {
      diag(line(k_), Severity::Error, "type declaration without a name");
      type.name = "<anonymous>";
    }
    if (is(k_, "<")) {
      const auto gt = match_angle(k_, sig_.size());
      k_ = gt == kNpos ? k_ + 1 : gt + 1;
    }
    if (is(k_, "(")) k_ = skip_group(k_);  // primary constructor
    if (is(k_, ":")) {
      ++k_;
      auto base_start = k_;
      while (!at_end() && !is(k_, "{") && !is(k_, ";") && !is(k_, "}") &&
             !t(k_).is_identifier("where")) {
        if (is(k_, "<")) {
          const auto gt = match_angle(k_, sig_.size());
          k_ = gt == kNpos ? k_ + 1 : gt + 1;
          continue;
        }
        if (is(k_, "(")) {
          k_ = skip_group(k_);
          continue;
        }
        if (is(k_, ",")) {
          if (k_ > base_start) type.bases.emplace_back(text(base_start, k_));
          base_start = ++k_;
          continue;
        }
        ++k_;
      }
      if (k_ > base_start) type.bases.emplace_back(text(base_start, k_));
    }
    while (!at_end() && !is(k_, "{") && !is(k_, ";") && !is(k_, "}")) {
      if (is_opener(k_)) {
        k_ = skip_group(k_);
        continue;
      }
      ++k_;  // generic constraints
    }
    if (is(k_, ";")) {
      type.span.last = line(k_);
      ++k_;
      claim(RegionKind::TypeHeader, k_);
      return type;
    }
    if (!is(k_, "{")) {
      diag(line(decl_start), Severity::Error, "type '" + type.name + "' has no body");
      type.span.last = line(std::min(k_, sig_.size() - 1));
      claim(RegionKind::TypeHeader, k_);
      return type;
    }
    ++k_;
    claim(RegionKind::TypeHeader, k_);
    if (type.kind == TypeKind::Enum) {
      const auto close = partner(k_ - 1);
      if (close == kNpos) {
        diag(line(decl_start), Severity::Error, "missing '}' for enum " + type.name);
        k_ = sig_.size();
        claim(RegionKind::Member, k_);
        type.span.last = eof_.line;
        return type;
      }
      k_ = close;
      claim(RegionKind::Member, k_);
      ++k_;
      claim(RegionKind::Brace, k_);
      type.span.last = line(close);
    } else {
      parse_type_body(type);
    }
    if (is(k_, ";")) {
      ++k_;
      claim(RegionKind::Brace, k_);
    }
    return type;
  }

  void parse_type_body(TypeDecl& type) {
    while (true) {
      if (at_end()) {
        diag(eof_.line, Severity::Error, "missing '}' for type " + type.name);
        type.span.last = sig_.empty() ? eof_.line : last_line_of(sig_.size() - 1);
        return;
      }
      if (is(k_, "}")) {
        type.span.last = line(k_);
        ++k_;
        claim(RegionKind::Brace, k_);
        return;
      }
      if (t(k_).is_keyword("namespace")) {
        diag(line(k_), Severity::Error, "missing '}' for type " + type.name);
        type.span.last = line(k_ - 1);
        return;
      }
      if (is(k_, ")") || is(k_, "]")) {
        diag(line(k_), Severity::Error, std::string("unmatched '") + std::string(t(k_).text) + "'");
        ++k_;
        claim(RegionKind::Stray, k_);
        continue;
      }
      const auto start = k_;
      auto attrs = parse_attributes();
      auto mods = parse_modifiers();
      if (at_end()) continue;
      if (at_type_start()) {
        type.nested.push_back(parse_type(type.namespace_name, std::move(attrs), std::move(mods), start));
        continue;
      }
      if (t(k_).is_keyword("delegate")) {
        skip_construct(kNpos);
        claim(RegionKind::Member, k_);
        continue;
      }
      if (is(k_, "}")) continue;
      parse_member(type, std::move(attrs), std::move(mods), start);
      if (k_ == start) {
        diag(line(k_), Severity::Warning, "unparsable member token skipped");
        ++k_;
        claim(RegionKind::Opaque, k_);
      }
    }
  }

  struct HeaderScan {
    std::size_t stop = kNpos;   // terminator index
    std::size_t paren = kNpos;  // parameter list '(' of a method-like member
  };

  // Finds the first depth-0 terminator of a member header starting at k_.
  [[nodiscard]] HeaderScan scan_member_header() const {
    HeaderScan scan;
    int angle = 0;
    for (auto j = k_; j < sig_.size(); ++j) {
      const auto& tok = t(j);
      if (j > k_ && (is_access_keyword(tok) || is_type_keyword(tok) ||
                     tok.is_keyword("namespace"))) {
        scan.stop = j;
        return scan;
      }
      if (tok.is("<")) {
        ++angle;
        continue;
      }
      if (tok.is(">")) {
        if (angle > 0) --angle;
        continue;
      }
      if (tok.is("(")) {
        if (angle == 0 && is_parameter_list(j)) {
          scan.paren = j;
          scan.stop = j;
          return scan;
        }
        const auto close = partner(j);
        if (close == kNpos) {
          scan.stop = j;
          return scan;
        }
        j = close;
        continue;
      }
      if (tok.is("[")) {
        const auto close = partner(j);
        if (close == kNpos) {
          scan.stop = j;
          return scan;
        }
        j = close;
        continue;
      }
      if (angle > 0 && !tok.is("=>") && !tok.is("{") && !tok.is(";") && !tok.is("}")) continue;
      if (tok.is("{") || tok.is("=>") || tok.is("=") || tok.is(";") || tok.is(",") ||
          tok.is("}") || tok.is(")") || tok.is("]")) {
        scan.stop = j;
        return scan;
      }
    }
    return scan;
  }

  // '(' at j opens a parameter list when it follows a member name.
  [[nodiscard]] bool is_parameter_list(std::size_t j) const {
    if (j == k_) return false;
    for (auto p = k_; p < j; ++p) {
      if (t(p).is_keyword("operator")) return true;
    }
    auto p = j - 1;
    if (t(p).is(">")) {
      const auto lt = match_angle_back(p, k_);
      if (lt == kNpos || lt == k_) return false;
      p = lt - 1;
    }
    return t(p).kind == TokenKind::Identifier;
  }

  void parse_member(TypeDecl& type, std::vector<AttributeUse> attrs,
                    std::vector<std::string> mods, std::size_t decl_start) {
    if (is(k_, "~")) {
      if (t(k_ + 1).kind == TokenKind::Identifier && is(k_ + 2, "(")) {
        MethodDecl method;
        method.kind = MethodKind::Destructor;
        method.name = "~" + strip_verbatim(t(k_ + 1).text);
        method.attributes = std::move(attrs);
        method.modifiers = std::move(mods);
        method.signature_line = line(k_);
        method.span.first = line(decl_start);
        parse_method_rest(type, method, k_ + 2);
        return;
      }
    }
    const auto scan = scan_member_header();
    if (scan.stop == kNpos) {
      diag(line(k_), Severity::Error, "member declaration runs to end of file");
      k_ = sig_.size();
      claim(RegionKind::Opaque, k_);
      return;
    }
    const auto stop = scan.stop;
    const auto& term = t(stop);
    if (scan.paren != kNpos) {
      parse_method(type, std::move(attrs), std::move(mods), decl_start, scan.paren);
      return;
    }
    if (stop == k_ || term.is("}") || term.is(")") || term.is("]") ||
        (stop > k_ && (is_access_keyword(term) || is_type_keyword(term) ||
                       term.is_keyword("namespace")))) {
      if (stop > k_) {
        diag(line(k_), Severity::Warning, "incomplete member declaration skipped");
        k_ = stop;
        claim(RegionKind::Opaque, k_);
      }
      return;
    }
    if (term.is("{") || term.is("=>")) {
      parse_property(type, decl_start, stop);
      return;
    }
    parse_fields(type, mods, stop);
  }

  void parse_method(TypeDecl& type, std::vector<AttributeUse> attrs,
                    std::vector<std::string> mods, std::size_t decl_start, std::size_t paren) {
    MethodDecl method;
    method.attributes = std::move(attrs);
    method.modifiers = std::move(mods);
    method.signature_line = line(k_);
    method.span.first = line(decl_start);

    std::size_t operator_at = kNpos;
    for (auto p = k_; p < paren; ++p) {
      if (t(p).is_keyword("operator")) {
        operator_at = p;
        break;
      }
    }
    if (operator_at != kNpos) {
      const bool implicit = operator_at > k_ && t(operator_at - 1).is_keyword("implicit");
      const bool explicit_ = operator_at > k_ && t(operator_at - 1).is_keyword("explicit");
      if (implicit || explicit_) {
        method.kind = MethodKind::Conversion;
        method.name = implicit ? "op_Implicit" : "op_Explicit";
        method.conversion_target = std::string(text(operator_at + 1, paren));
        method.return_type = method.conversion_target;
      } else {
        method.kind = MethodKind::Operator;
        method.name = "operator" + std::string(text(operator_at + 1, paren));
        method.return_type = std::string(text(k_, operator_at));
      }
    } else {
      auto name_k = paren - 1;
      if (t(name_k).is(">")) name_k = match_angle_back(name_k, k_) - 1;
      method.name = strip_verbatim(t(name_k).text);
      auto type_end = name_k;
      // Explicit interface implementation: `void IFoo.Bar()`.
      while (type_end >= k_ + 2 && t(type_end - 1).is(".") &&
             t(type_end - 2).kind == TokenKind::Identifier) {
        type_end -= 2;
      }
      method.return_type = std::string(text(k_, type_end));
      if (name_k == k_) {
        method.kind = MethodKind::Constructor;
        if (method.name != type.name) {
          diag(line(k_), Severity::Note, "method '" + method.name + "' has no return type");
        }
      }
    }
    parse_method_rest(type, method, paren);
  }

  // Continues at the parameter list '(' through the body.
  void parse_method_rest(TypeDecl& type, MethodDecl& method, std::size_t paren) {
    const auto close = partner(paren);
    if (close == kNpos) {
      diag(line(paren), Severity::Error, "unterminated parameter list for " + method.name);
      k_ = sig_.size();
      claim(RegionKind::MethodHeader, k_);
      method.span.last = eof_.line;
      type.methods.push_back(std::move(method));
      return;
    }
    method.parameters = std::string(text(paren + 1, close));
    method.parameter_count = count_top_level_items(paren + 1, close);
    k_ = close + 1;
    // Constraints and constructor initializers.
    while (!at_end() && !is(k_, "{") && !is(k_, "=>") && !is(k_, ";") && !is(k_, "}") &&
           !is_access_keyword(t(k_))) {
      if (is_opener(k_)) {
        k_ = skip_group(k_);
        continue;
      }
      ++k_;
    }
    if (is(k_, ";")) {
      method.span.last = line(k_);
      ++k_;
      claim(RegionKind::MethodHeader, k_);
    } else if (is(k_, "{")) {
      claim(RegionKind::MethodHeader, k_);
      method.has_body = true;
      const auto open = k_;
      parse_block(method, 1, 0);
      method.span.last = k_ > open ? last_line_of(k_ - 1) : line(open);
    } else if (is(k_, "=>")) {
      ++k_;
      claim(RegionKind::MethodHeader, k_);
      method.has_body = true;
      parse_simple_statement(method, 1);
      method.span.last = last_line_of(k_ - 1);
    } else {
      diag(line(close), Severity::Error, "method '" + method.name + "' has no body or ';'");
      claim(RegionKind::MethodHeader, k_);
      method.span.last = line(close);
    }
    type.methods.push_back(std::move(method));
  }

  int count_top_level_items(std::size_t a, std::size_t b) const {
    if (a >= b) return 0;
    int count = 1;
    int angle = 0;
    for (auto j = a; j < b; ++j) {
      if (is_opener(j)) {
        const auto close = partner(j);
        if (close == kNpos || close > b) break;
        j = close;
      } else if (is(j, "<")) {
        ++angle;
      } else if (is(j, ">")) {
        if (angle > 0) --angle;
      } else if (is(j, ",") && angle == 0) {
        ++count;
      }
    }
    return count;
  }

  void parse_property(TypeDecl& type, std::size_t decl_start, std::size_t stop) {
    // Name: identifier before the terminator, or `this[...]` for indexers.
    std::string name;
    auto name_k = stop - 1;
    if (is(name_k, "]")) {
      const auto open = partner(name_k);
      if (open != kNpos && open > k_ && t(open - 1).is_keyword("this")) name = "this[]";
    }
    if (name.empty()) name = strip_verbatim(t(name_k).text);
    if (t(stop).is("=>")) {
      k_ = stop + 1;
      claim(RegionKind::Member, k_);
      MethodDecl getter;
      getter.kind = MethodKind::Accessor;
      getter.name = "get_" + name;
      getter.signature_line = line(decl_start);
      getter.span.first = line(decl_start);
      getter.has_body = true;
      parse_simple_statement(getter, 1);
      getter.span.last = last_line_of(k_ - 1);
      type.methods.push_back(std::move(getter));
      return;
    }
    // Accessor list.
    const auto close = partner(stop);
    if (close == kNpos) {
      diag(line(stop), Severity::Error, "unterminated accessor list for " + name);
      k_ = sig_.size();
      claim(RegionKind::Member, k_);
      return;
    }
    k_ = stop + 1;
    claim(RegionKind::Member, k_);
    while (!at_end() && k_ < close) {
      const auto acc_start = k_;
      parse_attributes();
      while (!at_end() && k_ < close && is_modifier_at(k_)) ++k_;
      const auto& kw = t(k_);
      const bool accessor = kw.kind == TokenKind::Identifier &&
                            (kw.text == "get" || kw.text == "set" || kw.text == "init" ||
                             kw.text == "add" || kw.text == "remove");
      if (!accessor) {
        diag(line(k_), Severity::Warning, "unrecognized accessor in " + name);
        k_ = close;
        claim(RegionKind::Opaque, k_);
        break;
      }
      MethodDecl acc;
      acc.kind = MethodKind::Accessor;
      acc.name = std::string(kw.text) + "_" + name;
      acc.signature_line = line(k_);
      acc.span.first = line(acc_start);
      ++k_;
      if (is(k_, ";")) {
        ++k_;
        claim(RegionKind::Member, k_);
        continue;
      }
      if (is(k_, "{")) {
        claim(RegionKind::MethodHeader, k_);
        acc.has_body = true;
        parse_block(acc, 1, 0);
        acc.span.last = last_line_of(k_ - 1);
        type.methods.push_back(std::move(acc));
        continue;
      }
      if (is(k_, "=>")) {
        ++k_;
        claim(RegionKind::MethodHeader, k_);
        acc.has_body = true;
        parse_simple_statement(acc, 1);
        acc.span.last = last_line_of(k_ - 1);
        type.methods.push_back(std::move(acc));
        continue;
      }
      diag(line(k_), Severity::Warning, "malformed accessor in " + name);
      k_ = close;
      claim(RegionKind::Opaque, k_);
      break;
    }
    k_ = close + 1;
    claim(RegionKind::Brace, k_);
    if (is(k_, "=")) {  // property initializer
      skip_expression_to_semicolon();
      claim(RegionKind::Member, k_);
    }
  }

  void skip_expression_to_semicolon() {
    while (!at_end()) {
      if (is(k_, ";")) {
        ++k_;
        return;
      }
      if (is_opener(k_)) {
        k_ = skip_group(k_);
        continue;
      }
      if (is_closer(k_)) return;
      ++k_;
    }
  }

  void parse_fields(TypeDecl& type, const std::vector<std::string>& mods, std::size_t stop) {
    const bool is_static = std::find(mods.begin(), mods.end(), "static") != mods.end();
    const bool is_const = std::find(mods.begin(), mods.end(), "const") != mods.end();
    auto type_start = k_;
    if (t(type_start).is_keyword("event")) ++type_start;
    auto name_k = stop - 1;
    if (is(name_k, "]")) {  // fixed-size buffer
      const auto open = partner(name_k);
      if (open != kNpos && open > type_start) name_k = open - 1;
    }
    const auto type_text = std::string(text(type_start, name_k));
    auto j = stop;
    auto declare = [&](std::size_t nk, std::size_t init_a, std::size_t init_b) {
      if (t(nk).kind != TokenKind::Identifier) return;
      FieldDecl field;
      field.name = strip_verbatim(t(nk).text);
      field.type = type_text;
      field.is_static = is_static;
      field.is_const = is_const;
      field.line = line(nk);
      if (init_a < init_b) field.initializer = std::string(text(init_a, init_b));
      type.fields.push_back(std::move(field));
    };
    while (true) {
      std::size_t init_a = 0;
      std::size_t init_b = 0;
      if (is(j, "=")) {
        init_a = j + 1;
        j = init_a;
        while (j < sig_.size() && !is(j, ",") && !is(j, ";") && !is(j, "}")) {
          if (is_opener(j)) {
            j = skip_group(j);
            continue;
          }
          if (is_closer(j)) break;
          if (is(j, "<")) {
            const auto gt = generic_close(j, sig_.size());
            if (gt != kNpos) {
              j = gt + 1;
              continue;
            }
          }
          ++j;
        }
        init_b = j;
      }
      declare(name_k, init_a, init_b);
      if (is(j, ",") && t(j + 1).kind == TokenKind::Identifier) {
        name_k = j + 1;
        j = j + 2;
        while (is(j, "[")) j = skip_group(j);
        continue;
      }
      break;
    }
    if (is(j, ";")) {
      k_ = j + 1;
    } else {
      diag(line(k_), Severity::Warning, "field declaration without ';'");
      k_ = j;
    }
    claim(RegionKind::Member, k_);
  }

  // ---- statements ---------------------------------------------------------

  enum class Flow { Ok, Abort };

  // k_ at '{'. Returns Abort when a declaration keyword shows the block was
  // never closed.
  Flow parse_block(MethodDecl& method, int depth, int nesting) {
    const auto open = k_;
    if (nesting > kMaxNesting) {
      k_ = skip_group(open);
      claim(RegionKind::Opaque, k_);
      diag(line(open), Severity::Warning, "nesting too deep, block kept opaque");
      add_statement(method, StatementKind::Opaque, open, k_, depth);
      return Flow::Ok;
    }
    ++k_;
    claim(RegionKind::Brace, k_);
    while (true) {
      if (at_end()) {
        diag(line(open), Severity::Error, "missing '}' in " + method.name);
        return Flow::Abort;
      }
      if (is(k_, "}")) {
        ++k_;
        claim(RegionKind::Brace, k_);
        return Flow::Ok;
      }
      if (parse_statement(method, depth, nesting + 1) == Flow::Abort) {
        if (!at_end()) diag(line(open), Severity::Error, "missing '}' in " + method.name);
        return Flow::Abort;
      }
    }
  }

  [[nodiscard]] bool is_recovery_marker(std::size_t k) const {
    const auto& tok = t(k);
    return is_access_keyword(tok) || tok.is_keyword("namespace") || tok.is_keyword("class") ||
           tok.is_keyword("struct") || tok.is_keyword("interface") || tok.is_keyword("enum");
  }

  Flow parse_statement(MethodDecl& method, int depth, int nesting) {
    if (at_end()) return Flow::Abort;
    if (nesting > kMaxNesting) {
      const auto start = k_;
      parse_simple_statement(method, depth);
      if (k_ == start) ++k_;
      return Flow::Ok;
    }
    const auto& tok = t(k_);
    if (tok.is("{")) return parse_block(method, depth + 1, nesting);
    if (tok.is(";")) {
      ++k_;
      claim(RegionKind::Statement, k_);
      return Flow::Ok;
    }
    if (tok.is("}")) return Flow::Ok;  // caller closes the block
    if (tok.is(")") || tok.is("]")) {
      diag(line(k_), Severity::Error, std::string("unmatched '") + std::string(tok.text) + "'");
      ++k_;
      claim(RegionKind::Stray, k_);
      return Flow::Ok;
    }
    if (is_recovery_marker(k_)) return Flow::Abort;

    if (tok.is_keyword("if") || tok.is_keyword("while") || tok.is_keyword("for") ||
        tok.is_keyword("foreach") || tok.is_keyword("switch") || tok.is_keyword("lock") ||
        tok.is_keyword("fixed") || (tok.is_keyword("using") && is(k_ + 1, "(")) ||
        (tok.is_identifier("await") && t(k_ + 1).is_keyword("foreach"))) {
      const auto start = k_;
      if (tok.is_identifier("await")) ++k_;
      const bool is_switch = t(k_).is_keyword("switch");
      const bool is_if = t(k_).is_keyword("if");
      ++k_;
      if (is(k_, "(")) k_ = skip_group(k_);
      add_statement(method, StatementKind::Control, start, k_, depth);
      claim(RegionKind::Statement, k_);
      if (is_switch && is(k_, "{")) return parse_switch_block(method, depth + 1, nesting);
      if (parse_embedded(method, depth + 1, nesting) == Flow::Abort) return Flow::Abort;
      if (is_if && t(k_).is_keyword("else")) {
        add_statement(method, StatementKind::Control, k_, k_ + 1, depth);
        ++k_;
        claim(RegionKind::Statement, k_);
        return parse_embedded(method, depth + 1, nesting);
      }
      return Flow::Ok;
    }
    if (tok.is_keyword("else")) {  // dangling
      add_statement(method, StatementKind::Control, k_, k_ + 1, depth);
      ++k_;
      claim(RegionKind::Statement, k_);
      return parse_embedded(method, depth + 1, nesting);
    }
    if (tok.is_keyword("do")) {
      add_statement(method, StatementKind::Control, k_, k_ + 1, depth);
      ++k_;
      claim(RegionKind::Statement, k_);
      if (parse_embedded(method, depth + 1, nesting) == Flow::Abort) return Flow::Abort;
      if (t(k_).is_keyword("while")) {
        const auto start = k_;
        ++k_;
        if (is(k_, "(")) k_ = skip_group(k_);
        if (is(k_, ";")) ++k_;
        add_statement(method, StatementKind::Control, start, k_, depth);
        claim(RegionKind::Statement, k_);
      }
      return Flow::Ok;
    }
    if (tok.is_keyword("try")) {
      add_statement(method, StatementKind::Control, k_, k_ + 1, depth);
      ++k_;
      claim(RegionKind::Statement, k_);
      if (parse_embedded(method, depth + 1, nesting) == Flow::Abort) return Flow::Abort;
      while (t(k_).is_keyword("catch") || t(k_).is_keyword("finally")) {
        const auto start = k_;
        ++k_;
        if (is(k_, "(")) k_ = skip_group(k_);
        if (t(k_).is_identifier("when")) {
          ++k_;
          if (is(k_, "(")) k_ = skip_group(k_);
        }
        add_statement(method, StatementKind::Control, start, k_, depth);
        claim(RegionKind::Statement, k_);
        if (parse_embedded(method, depth + 1, nesting) == Flow::Abort) return Flow::Abort;
      }
      return Flow::Ok;
    }
    if ((tok.is_keyword("checked") || tok.is_keyword("unchecked") || tok.is_keyword("unsafe")) &&
        is(k_ + 1, "{")) {
      add_statement(method, StatementKind::Control, k_, k_ + 1, depth);
      ++k_;
      claim(RegionKind::Statement, k_);
      return parse_block(method, depth + 1, nesting);
    }
    if ((tok.is_keyword("case") || tok.is_keyword("default")) &&
        (tok.is_keyword("case") || is(k_ + 1, ":"))) {
      const auto start = k_;
      auto j = k_ + 1;
      while (j < sig_.size() && !is(j, ":") && !is(j, ";") && !is(j, "}")) {
        j = is_opener(j) ? skip_group(j) : j + 1;
      }
      k_ = is(j, ":") ? j + 1 : j;
      add_statement(method, StatementKind::Control, start, k_, depth);
      claim(RegionKind::Statement, k_);
      return Flow::Ok;
    }
    if (tok.kind == TokenKind::Identifier && is(k_ + 1, ":") &&
        !contextual_modifiers().contains(tok.text)) {  // goto label
      add_statement(method, StatementKind::Control, k_, k_ + 2, depth);
      k_ += 2;
      claim(RegionKind::Statement, k_);
      return Flow::Ok;
    }
    if (const auto local_fn = local_function_at(k_); local_fn != kNpos) {
      const auto start = k_;
      method.local_functions.push_back(strip_verbatim(t(local_fn).text));
      k_ = skip_group(local_fn + (is(local_fn + 1, "<") ? match_angle(local_fn + 1, sig_.size()) - local_fn + 1 : 1));
      while (!at_end() && !is(k_, "{") && !is(k_, "=>") && !is(k_, ";") && !is(k_, "}")) {
        k_ = is_opener(k_) ? skip_group(k_) : k_ + 1;
      }
      add_statement(method, StatementKind::Control, start, k_, depth);
      if (is(k_, "{")) {
        claim(RegionKind::Statement, k_);
        return parse_block(method, depth + 1, nesting);
      }
      if (is(k_, "=>")) {
        ++k_;
        claim(RegionKind::Statement, k_);
        parse_simple_statement(method, depth + 1);
        return Flow::Ok;
      }
      if (is(k_, ";")) ++k_;
      claim(RegionKind::Statement, k_);
      return Flow::Ok;
    }
    parse_simple_statement(method, depth);
    return Flow::Ok;
  }

  Flow parse_embedded(MethodDecl& method, int depth, int nesting) {
    if (at_end()) return Flow::Abort;
    if (is(k_, "}")) {
      diag(line(k_), Severity::Warning, "missing embedded statement");
      return Flow::Ok;
    }
    if (is(k_, "{")) return parse_block(method, depth, nesting + 1);
    return parse_statement(method, depth, nesting + 1);
  }

  Flow parse_switch_block(MethodDecl& method, int depth, int nesting) {
    const auto open = k_;
    ++k_;
    claim(RegionKind::Brace, k_);
    while (true) {
      if (at_end()) {
        diag(line(open), Severity::Error, "missing '}' for switch in " + method.name);
        return Flow::Abort;
      }
      if (is(k_, "}")) {
        ++k_;
        claim(RegionKind::Brace, k_);
        return Flow::Ok;
      }
      if (parse_statement(method, depth, nesting + 1) == Flow::Abort) return Flow::Abort;
    }
  }

  // When a local function declaration starts at k, returns the index of its
  // name token.
  [[nodiscard]] std::size_t local_function_at(std::size_t k) const {
    auto j = k;
    while (t(j).is_keyword("static") || t(j).is_keyword("unsafe") || t(j).is_keyword("extern") ||
           t(j).is_identifier("async")) {
      ++j;
    }
    const auto type_end = type_end_at(j);
    if (type_end == kNpos || t(type_end).kind != TokenKind::Identifier) return kNpos;
    const auto name = type_end;
    auto p = name + 1;
    if (is(p, "<")) {
      const auto gt = match_angle(p, sig_.size());
      if (gt == kNpos) return kNpos;
      p = gt + 1;
    }
    if (!is(p, "(")) return kNpos;
    const auto close = partner(p);
    if (close == kNpos) return kNpos;
    const auto& after = t(close + 1);
    if (after.is("{") || after.is("=>") || after.is_identifier("where")) return name;
    return kNpos;
  }

  // End (exclusive) of a type expression starting at k, or kNpos.
  [[nodiscard]] std::size_t type_end_at(std::size_t k) const {
    auto j = k;
    const auto& first = t(j);
    if (first.is("(")) {  // tuple type
      const auto close = partner(j);
      if (close == kNpos) return kNpos;
      bool comma = false;
      for (auto q = j + 1; q < close; ++q) {
        if (is_opener(q)) {
          const auto c = partner(q);
          if (c == kNpos) return kNpos;
          q = c;
        } else if (is(q, ",")) {
          comma = true;
        }
      }
      if (!comma) return kNpos;
      j = close + 1;
    } else if (first.kind == TokenKind::Keyword && builtin_types().contains(first.text)) {
      ++j;
    } else if (first.kind == TokenKind::Identifier &&
               !expression_context_words().contains(first.text)) {
      ++j;
      while (true) {
        if ((is(j, ".") || is(j, "::")) && t(j + 1).kind == TokenKind::Identifier) {
          j += 2;
          continue;
        }
        if (is(j, "<")) {
          const auto gt = match_angle(j, sig_.size());
          if (gt == kNpos) return kNpos;
          j = gt + 1;
          continue;
        }
        break;
      }
    } else {
      return kNpos;
    }
    while (true) {
      if (is(j, "?") || is(j, "*")) {
        ++j;
        continue;
      }
      if (is(j, "[")) {
        const auto close = partner(j);
        if (close == kNpos) return kNpos;
        for (auto q = j + 1; q < close; ++q) {
          if (!is(q, ",")) return kNpos;
        }
        j = close + 1;
        continue;
      }
      break;
    }
    return j;
  }

  // Expression or declaration statement ending at ';'.
  void parse_simple_statement(MethodDecl& method, int depth) {
    const auto start = k_;
    auto j = k_;
    bool terminated = false;
    while (j < sig_.size()) {
      if (is(j, ";")) {
        terminated = true;
        ++j;
        break;
      }
      if (is_opener(j)) {
        j = skip_group(j);
        continue;
      }
      if (is_closer(j)) break;
      if (j > start && (is_access_keyword(t(j)) || t(j).is_keyword("namespace"))) break;
      ++j;
    }
    if (j == start) {
      // Lone closer or marker; leave it to the caller.
      return;
    }
    if (!terminated && j < sig_.size()) {
      diag(line(start), Severity::Warning, "statement without ';'");
    }
    k_ = j;
    const auto end = terminated ? j - 1 : j;
    add_statement(method, classify_simple(start, end), start, j, depth);
    claim(RegionKind::Statement, k_);
  }

  StatementKind classify_simple(std::size_t a, std::size_t b) const {
    if (a >= b) return StatementKind::Opaque;
    const auto& first = t(a);
    if (first.is_keyword("return")) return StatementKind::Return;
    if (first.is_identifier("yield") &&
        (t(a + 1).is_keyword("return") || t(a + 1).is_keyword("break"))) {
      return StatementKind::Yield;
    }
    if (first.is_keyword("throw") || first.is_keyword("break") || first.is_keyword("continue") ||
        first.is_keyword("goto")) {
      return StatementKind::Control;
    }
    if (declaration_start(a, b) != kNpos) return StatementKind::LocalDeclaration;
    if (assignment_op(a, b) != kNpos) return StatementKind::Assignment;
    if (is(a, "++") || is(a, "--") || is(b - 1, "++") || is(b - 1, "--")) {
      return StatementKind::Assignment;
    }
    for (auto j = a; j < b; ++j) {
      if (is(j, "(") && call_name_at(j, a) != kNpos) return StatementKind::Invocation;
    }
    return StatementKind::Opaque;
  }

  // Index of the type start when [a, b) is a local declaration, else kNpos.
  [[nodiscard]] std::size_t declaration_start(std::size_t a, std::size_t b) const {
    auto j = a;
    if (t(j).is_identifier("await") && t(j + 1).is_keyword("using")) ++j;
    if (t(j).is_keyword("using")) ++j;
    while (t(j).is_keyword("const") || t(j).is_keyword("ref") || t(j).is_keyword("readonly") ||
           t(j).is_identifier("scoped")) {
      ++j;
    }
    if (j >= b) return kNpos;
    if (t(j).is_identifier("var") && is(j + 1, "(")) return j;  // deconstruction
    const auto type_end = type_end_at(j);
    if (type_end == kNpos || type_end >= b) return kNpos;
    if (t(type_end).kind != TokenKind::Identifier) return kNpos;
    const auto& after = t(type_end + 1);
    if (type_end + 1 >= b || after.is("=") || after.is(",") || after.is(";")) return j;
    return kNpos;
  }

  [[nodiscard]] std::size_t assignment_op(std::size_t a, std::size_t b) const {
    for (auto j = a; j < b; ++j) {
      if (is_opener(j)) {
        const auto close = partner(j);
        if (close == kNpos) return kNpos;
        j = close;
        continue;
      }
      if (is(j, "=>")) return kNpos;
      if (is_assignment_op(t(j))) return j;
    }
    return kNpos;
  }

  // ---- fact extraction ----------------------------------------------------

  // If '(' at j is a call or object creation, returns the member-name index.
  [[nodiscard]] std::size_t call_name_at(std::size_t j, std::size_t floor) const {
    if (j == 0 || j <= floor) return kNpos;
    auto p = j - 1;
    if (t(p).is(">")) {
      const auto lt = match_angle_back(p, floor);
      if (lt == kNpos || lt == floor) return kNpos;
      p = lt - 1;
    }
    const auto& name = t(p);
    if (name.kind != TokenKind::Identifier || non_call_words().contains(name.text)) return kNpos;
    return p;
  }

  struct Chain {
    std::vector<std::string> segments;
    std::size_t root = 0;
    bool creation = false;
  };

  [[nodiscard]] Chain receiver_chain(std::size_t name_k, std::size_t floor) const {
    Chain chain;
    chain.segments.push_back(strip_verbatim(t(name_k).text));
    auto r = name_k;
    while (r >= floor + 2) {
      const auto& sep = t(r - 1);
      if (!(sep.is(".") || sep.is("?.") || sep.is("::"))) break;
      auto s = r - 2;
      if (t(s).is("!")) {  // null-forgiving
        if (s == floor) break;
        --s;
      }
      if (t(s).is(">")) {  // Generic<T>.Member
        const auto lt = match_angle_back(s, floor);
        if (lt == kNpos || lt == floor) break;
        s = lt - 1;
      }
      if (t(s).is(")") || t(s).is("]")) {
        const auto open = partner(s);
        if (open == kNpos || open <= floor) break;
        s = open - 1;
        if (t(s).is(">")) {
          const auto lt = match_angle_back(s, floor);
          if (lt == kNpos || lt == floor) break;
          s = lt - 1;
        }
      }
      const auto& seg = t(s);
      if (seg.kind == TokenKind::Identifier || seg.is_keyword("this") || seg.is_keyword("base")) {
        chain.segments.insert(chain.segments.begin(), strip_verbatim(seg.text));
        r = s;
        continue;
      }
      if (seg.kind == TokenKind::Keyword && builtin_types().contains(seg.text)) {
        chain.segments.insert(chain.segments.begin(), std::string(seg.text));
        r = s;
      }
      break;
    }
    chain.root = r;
    chain.creation = r > floor && t(r - 1).is_keyword("new");
    return chain;
  }

  // True when `Name(` at name_k declares something rather than calling it.
  [[nodiscard]] bool looks_like_declaration(const Chain& chain, std::size_t floor) const {
    if (chain.creation || chain.segments.size() != 1 || chain.root <= floor) return false;
    const auto& prev = t(chain.root - 1);
    if (prev.kind == TokenKind::Identifier) return !expression_context_words().contains(prev.text);
    if (prev.kind == TokenKind::Keyword) return builtin_types().contains(prev.text);
    return prev.is(">") || prev.is("]") || prev.is("?");
  }

  ArgumentKind argument_kind(std::size_t a, std::size_t b) const {
    if (a >= b) return ArgumentKind::Other;
    // Named argument `name: value`.
    if (b - a > 2 && t(a).kind == TokenKind::Identifier && is(a + 1, ":")) a += 2;
    if (b - a == 1) {
      if (t(a).kind == TokenKind::StringLiteral && !t(a).text.starts_with("'")) {
        return ArgumentKind::StringLiteral;
      }
      if (t(a).kind == TokenKind::InterpolatedString) return ArgumentKind::InterpolatedString;
    }
    if (t(a).is_keyword("delegate") || (t(a).is_identifier("async") && b - a > 1)) {
      return ArgumentKind::Lambda;
    }
    for (auto j = a; j < b; ++j) {
      if (is_opener(j)) {
        const auto close = partner(j);
        if (close == kNpos || close >= b) break;
        j = close;
        continue;
      }
      if (is(j, "=>")) return ArgumentKind::Lambda;
    }
    return ArgumentKind::Other;
  }

  void fill_arguments(InvocationExpr& inv, std::size_t open, std::size_t close) {
    auto begin = open + 1;
    if (begin >= close) return;
    for (auto j = begin; j <= close; ++j) {
      if (j < close && is_opener(j)) {
        const auto c = partner(j);
        if (c == kNpos || c >= close) {
          j = close - 1;
          continue;
        }
        j = c;
        continue;
      }
      if (j < close && is(j, "<")) {
        const auto gt = generic_close(j, close);
        if (gt != kNpos) {
          j = gt;
          continue;
        }
      }
      if (j == close || is(j, ",")) {
        inv.argument_kinds.push_back(argument_kind(begin, j));
        inv.arguments.emplace_back(text(begin, j));
        inv.argument_spans.push_back(bytes(begin, j));
        begin = j + 1;
      }
    }
  }

  void collect_invocations(Statement& st, std::size_t a, std::size_t b) {
    for (auto j = a; j < b; ++j) {
      const auto& tok = t(j);
      if (tok.is("(")) {
        const auto name_k = call_name_at(j, a);
        if (name_k == kNpos) continue;
        auto chain = receiver_chain(name_k, a);
        if (looks_like_declaration(chain, a)) continue;
        InvocationExpr inv;
        inv.receiver_chain = std::move(chain.segments);
        inv.object_creation = chain.creation;
        inv.has_type_arguments = t(j - 1).is(">");
        inv.line = line(name_k);
        auto close = partner(j);
        if (close == kNpos || close >= b) close = b > j + 1 ? b - 1 : j;
        fill_arguments(inv, j, close);
        const auto first = chain.creation ? chain.root - 1 : chain.root;
        inv.raw_text = std::string(text(first, close + 1));
        inv.span = bytes(first, close + 1);
        st.invocations.push_back(std::move(inv));
        continue;
      }
      if (tok.is_keyword("new") && t(j + 1).kind == TokenKind::Identifier) {
        // `new T { ... }` without an argument list.
        auto q = j + 1;
        std::vector<std::string> segs{strip_verbatim(t(q).text)};
        ++q;
        while ((is(q, ".") || is(q, "::")) && t(q + 1).kind == TokenKind::Identifier) {
          segs.push_back(strip_verbatim(t(q + 1).text));
          q += 2;
        }
        bool type_args = false;
        if (is(q, "<")) {
          const auto gt = match_angle(q, b);
          if (gt == kNpos) continue;
          q = gt + 1;
          type_args = true;
        }
        if (!is(q, "{")) continue;
        InvocationExpr inv;
        inv.receiver_chain = std::move(segs);
        inv.object_creation = true;
        inv.has_type_arguments = type_args;
        inv.line = line(j + 1);
        const auto end = std::min(skip_group(q), b);
        inv.raw_text = std::string(text(j, end));
        inv.span = bytes(j, end);
        st.invocations.push_back(std::move(inv));
      }
    }
  }

  void collect_locals(Statement& st, std::size_t a, std::size_t b) {
    auto add_local = [&](std::size_t type_a, std::size_t type_b, std::size_t name_k,
                         std::size_t init_a, std::size_t init_b) {
      LocalDecl local;
      local.name = strip_verbatim(t(name_k).text);
      local.type = std::string(text(type_a, type_b));
      if (init_a < init_b) local.initializer = std::string(text(init_a, init_b));
      if (local.type == "var" && t(init_a).is_keyword("new") &&
          t(init_a + 1).kind == TokenKind::Identifier) {
        auto q = init_a + 1;
        const auto ts = q;
        ++q;
        while ((is(q, ".") || is(q, "::")) && t(q + 1).kind == TokenKind::Identifier) q += 2;
        local.type = std::string(text(ts, q));
      }
      st.locals.push_back(std::move(local));
    };

    auto declarators = [&](std::size_t type_a, std::size_t type_b, std::size_t limit) {
      auto j = type_b;
      while (j < limit && t(j).kind == TokenKind::Identifier) {
        const auto name_k = j;
        ++j;
        std::size_t init_a = 0;
        std::size_t init_b = 0;
        if (is(j, "=")) {
          init_a = ++j;
          while (j < limit && !is(j, ",") && !is(j, ";")) {
            if (is_opener(j)) {
              const auto c = partner(j);
              j = (c == kNpos || c >= limit) ? limit : c + 1;
              continue;
            }
            if (is(j, "<")) {
              const auto gt = generic_close(j, limit);
              if (gt != kNpos) {
                j = gt + 1;
                continue;
              }
            }
            ++j;
          }
          init_b = j;
        }
        add_local(type_a, type_b, name_k, init_a, init_b);
        if (!is(j, ",")) break;
        ++j;
      }
    };

    if (st.kind == StatementKind::LocalDeclaration) {
      const auto ts = declaration_start(a, b);
      if (ts != kNpos) {
        if (t(ts).is_identifier("var") && is(ts + 1, "(")) {
          const auto close = partner(ts + 1);
          for (auto q = ts + 2; close != kNpos && q < close; ++q) {
            if (t(q).kind == TokenKind::Identifier) add_local(ts, ts + 1, q, 0, 0);
          }
        } else {
          declarators(ts, type_end_at(ts), b);
        }
      }
    }
    if (st.kind == StatementKind::Control && a < b) {
      // foreach (T x in ...), using (T x = ...), for (T x = ...; ...), catch (T e)
      auto h = a;
      if (t(h).is_identifier("await")) ++h;
      const auto& kw = t(h);
      if ((kw.is_keyword("foreach") || kw.is_keyword("using") || kw.is_keyword("for") ||
           kw.is_keyword("catch") || kw.is_keyword("fixed")) &&
          is(h + 1, "(")) {
        const auto close = partner(h + 1);
        const auto limit = close == kNpos ? b : close;
        const auto ts = h + 2;
        const auto te = type_end_at(ts);
        if (te != kNpos && te < limit && t(te).kind == TokenKind::Identifier) {
          if (kw.is_keyword("foreach") || kw.is_keyword("catch")) {
            add_local(ts, te, te, 0, 0);
          } else {
            declarators(ts, te, limit);
          }
        }
      }
    }
    // out var x / out T x / is T x
    for (auto j = a; j + 2 < b; ++j) {
      if (t(j).is_keyword("out") || t(j).is_keyword("is")) {
        const auto te = type_end_at(j + 1);
        if (te != kNpos && te < b && t(te).kind == TokenKind::Identifier &&
            !expression_context_words().contains(t(te).text)) {
          add_local(j + 1, te, te, 0, 0);
        }
      }
    }
  }

  void add_statement(MethodDecl& method, StatementKind kind, std::size_t a, std::size_t b,
                     int depth) {
    b = std::min(b, sig_.size());
    if (a >= b) return;
    Statement st;
    st.kind = kind;
    st.depth = depth;
    st.line = line(a);
    st.last_line = last_line_of(b - 1);
    st.raw_text = std::string(text(a, b));
    st.span = bytes(a, b);
    // Facts for a control header stop at its embedded body.
    for (auto j = a; j < b; ++j) {
      const auto& tok = t(j);
      if (tok.kind == TokenKind::Identifier) {
        bool member = false;
        if (j > a && (t(j - 1).is(".") || t(j - 1).is("?.") || t(j - 1).is("::"))) {
          member = !(j >= a + 2 && t(j - 2).is_keyword("this") && t(j - 1).is("."));
        }
        st.identifiers.push_back({strip_verbatim(tok.text), member, tok.line});
      } else if (tok.kind == TokenKind::StringLiteral || tok.kind == TokenKind::InterpolatedString) {
        st.string_literals.emplace_back(tok.text);
      }
    }
    collect_invocations(st, a, b);
    collect_locals(st, a, b);
    if (kind == StatementKind::Assignment) {
      const auto end = is(b - 1, ";") ? b - 1 : b;
      const auto op = assignment_op(a, end);
      if (op != kNpos) {
        st.assignments.push_back({std::string(text(a, op)), std::string(text(op + 1, end))});
      } else if (is(a, "++") || is(a, "--")) {
        st.assignments.push_back({std::string(text(a + 1, end)), {}});
      } else {
        st.assignments.push_back({std::string(text(a, end > a + 1 ? end - 1 : end)), {}});
      }
    }
    method.statements.push_back(std::move(st));
  }

  void finalize_body_loc(std::vector<TypeDecl>& types) {
    for (auto& type : types) {
      for (auto& method : type.methods) {
        method.body_loc = method.has_body
                              ? std::max(1, count_code_lines(unit_.lines, method.signature_line,
                                                             method.span.last))
                              : 0;
      }
      finalize_body_loc(type.nested);
    }
  }

  std::span<const Token> toks_;
  std::string_view src_;
  std::vector<std::size_t> sig_;
  std::vector<std::size_t> match_;
  Token eof_;
  std::size_t k_ = 0;
  std::size_t claimed_ = 0;
  SyntaxUnit unit_;
};

}  // namespace

SyntaxUnit parse_unit(std::span<const Token> tokens, std::string_view path) {
  return Parser(tokens, path).run();
}

SyntaxUnit parse_source(std::string_view source, std::string_view path) {
  auto lexed = tokenize(source);
  auto unit = parse_unit(lexed.tokens, path);
  unit.encoding_ok = lexed.encoding_ok;
  for (auto& d : lexed.diagnostics) d.file = std::string(path);
  unit.diagnostics.insert(unit.diagnostics.begin(), lexed.diagnostics.begin(),
                          lexed.diagnostics.end());
  return unit;
}

}  // namespace vrtestlint
