#pragma once

#include "jqml/error.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace jqml {

enum class TokenKind {
  Name,         // NCName or prefix:local; keywords are names too
  Variable,     // $name (text holds the name without `$`)
  ContextItem,  // $$
  String,       // text holds the unescaped value
  Integer,
  Decimal,
  Double,
  Symbol,  // punctuation and operators, text holds the spelling
  End,
};

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;
  SourcePos pos;

  bool is_symbol(std::string_view s) const { return kind == TokenKind::Symbol && text == s; }
  bool is_name(std::string_view s) const { return kind == TokenKind::Name && text == s; }
};

/// Splits `text` into tokens; the last token is End. Comments `(: ... :)`
/// nest. Throws LEX_ERROR.
std::vector<Token> lex(std::string_view text);

}  // namespace jqml
