#pragma once

#include <string_view>
#include <vector>

#include "fm/dsl/diagnostics.hpp"

namespace fm::dsl {

enum class Tok {
  Ident,
  String,
  Int,
  LBrace,
  RBrace,
  LParen,
  RParen,
  LBracket,
  RBracket,
  Semi,
  Comma,
  Colon,
  Dot,
  Arrow,   // ->
  Assign,  // =
  EqEq,    // ==
  Ne,      // !=
  Lt,
  Le,
  Gt,
  Ge,
  End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  long long ival = 0;
  SourceSpan span;
};

/// Tokenizes the whole input. Never throws: bad bytes become diagnostics and
/// are skipped, so the token list always ends with End. `//` comments run to
/// end of line; strings take \" and \\ escapes.
std::vector<Token> lex(std::string_view src, std::string_view file,
                       std::vector<Diagnostic>& diags);

}  // namespace fm::dsl
