#pragma once

#include <span>
#include <string_view>

#include "vrtestlint/lexer.hpp"
#include "vrtestlint/syntax.hpp"

namespace vrtestlint {

/// Island parser over a lossless token stream. Recognises namespaces, type
/// declarations, attributes, fields, methods/accessors and statements; anything
/// else is kept as opaque regions whose invocations are still extracted.
/// Deterministic and total: any token sequence yields a SyntaxUnit.
///
/// `tokens` must be the complete output of tokenize() for one buffer.
SyntaxUnit parse_unit(std::span<const Token> tokens, std::string_view path);

/// tokenize() + parse_unit(), carrying over lexer diagnostics and the
/// encoding verdict.
SyntaxUnit parse_source(std::string_view source, std::string_view path);

}  // namespace vrtestlint
