#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "vrtestlint/diagnostic.hpp"
#include "vrtestlint/loc.hpp"

namespace vrtestlint {

/// Inclusive 1-based line range.
struct LineSpan {
  int first = 0;
  int last = 0;

  [[nodiscard]] bool contains(const LineSpan& other) const {
    return first <= other.first && other.last <= last;
  }
  bool operator==(const LineSpan&) const = default;
};

/// Byte range [begin, end) of the source.
struct ByteSpan {
  std::size_t begin = 0;
  std::size_t end = 0;

  [[nodiscard]] bool contains(const ByteSpan& other) const {
    return begin <= other.begin && other.end <= end;
  }
  bool operator==(const ByteSpan&) const = default;
};

struct AttributeUse {
  std::string name;       // last segment, without an "Attribute" suffix
  std::string arguments;  // raw text between the parentheses, if any
  int line = 0;
};

struct FieldDecl {
  std::string name;
  std::string type;
  std::string initializer;  // raw text, empty when absent
  bool is_static = false;
  bool is_const = false;
  int line = 0;
};

enum class ArgumentKind : std::uint8_t { StringLiteral, InterpolatedString, Lambda, Other };

/// A call `a.b.C(...)` or an object creation `new T(...)`.
struct InvocationExpr {
  std::vector<std::string> receiver_chain;  // last segment is the invoked member
  bool object_creation = false;
  bool has_type_arguments = false;
  std::vector<ArgumentKind> argument_kinds;
  std::vector<std::string> arguments;  // raw text per argument
  std::vector<ByteSpan> argument_spans;
  std::string raw_text;
  ByteSpan span;
  int line = 0;

  [[nodiscard]] std::size_t argument_count() const { return argument_kinds.size(); }
  [[nodiscard]] const std::string& member() const { return receiver_chain.back(); }
  [[nodiscard]] const std::string& head() const { return receiver_chain.front(); }
};

enum class StatementKind : std::uint8_t {
  Invocation,
  Assignment,
  LocalDeclaration,
  Yield,
  Return,
  Control,
  Opaque,
};

struct LocalDecl {
  std::string name;
  std::string type;  // `var` is replaced by T for `var x = new T(...)`
  std::string initializer;
};

struct AssignmentExpr {
  std::string target;  // raw left-hand side
  std::string value;   // raw right-hand side
};

struct Identifier {
  std::string name;
  bool member_access = false;  // preceded by '.', '?.' or '::' (but not `this.`)
  int line = 0;
};

/// Method bodies are flattened: a control statement's header is one entry and
/// the statements it governs follow with depth + 1.
struct Statement {
  StatementKind kind = StatementKind::Opaque;
  int depth = 1;
  int line = 0;
  int last_line = 0;
  std::string raw_text;
  ByteSpan span;
  std::vector<InvocationExpr> invocations;
  std::vector<Identifier> identifiers;
  std::vector<std::string> string_literals;  // raw token text, quotes included
  std::vector<LocalDecl> locals;
  std::vector<AssignmentExpr> assignments;
};

enum class MethodKind : std::uint8_t {
  Method,
  Constructor,
  Destructor,
  Operator,
  Conversion,
  Accessor,
};

struct MethodDecl {
  std::string name;
  MethodKind kind = MethodKind::Method;
  std::vector<AttributeUse> attributes;
  std::vector<std::string> modifiers;
  std::string return_type;
  int parameter_count = 0;
  std::string parameters;          // raw text between the parentheses
  std::string conversion_target;   // for implicit/explicit operators
  std::vector<Statement> statements;
  std::vector<std::string> local_functions;
  bool has_body = false;
  int body_loc = 0;
  int signature_line = 0;
  LineSpan span;
};

enum class TypeKind : std::uint8_t { Class, Struct, Interface, Enum };

struct TypeDecl {
  TypeKind kind = TypeKind::Class;
  std::string name;
  std::string namespace_name;
  std::vector<AttributeUse> attributes;
  std::vector<std::string> modifiers;
  std::vector<std::string> bases;
  std::vector<FieldDecl> fields;
  std::vector<MethodDecl> methods;
  std::vector<TypeDecl> nested;
  bool is_record = false;
  LineSpan span;
};

enum class RegionKind : std::uint8_t {
  Directive,   // using / extern alias / namespace headers
  Attribute,
  TypeHeader,
  Member,      // field, event, delegate, property header
  MethodHeader,
  Statement,
  Brace,
  Opaque,      // skipped by recovery, bracket-balanced
  Stray,       // unmatched closing brackets
};

/// Partition of the significant bytes of the file: every non-trivia token lies
/// in exactly one region, regions are ordered and never overlap.
struct Region {
  RegionKind kind = RegionKind::Opaque;
  ByteSpan span;
};

struct SyntaxUnit {
  std::string path;
  std::vector<std::string> usings;
  std::vector<TypeDecl> declarations;
  std::vector<Diagnostic> diagnostics;
  std::vector<Region> regions;
  std::vector<LineKind> lines;
  LocStats loc;
  bool encoding_ok = true;
};

/// Depth-first visit of every type declaration, nested ones included.
template <typename Fn>
void for_each_type(const std::vector<TypeDecl>& types, Fn&& fn) {
  for (const auto& type : types) {
    fn(type);
    for_each_type(type.nested, fn);
  }
}

}  // namespace vrtestlint
