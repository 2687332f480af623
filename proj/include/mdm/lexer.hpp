// mdm/lexer.hpp - Tokenizer shared by the model and property front-ends
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mdm/source_span.hpp"

namespace mdm
{

enum class TokenKind : std::uint8_t { Ident, Int, Real, Duration, String, Symbol, End };

struct Token
{
  TokenKind kind = TokenKind::End;
  std::string text;  // identifier/symbol text, string contents, or number spelling
  double number = 0.0;
  std::int64_t integer = 0;
  SourceSpan span;

  bool is_symbol(std::string_view s) const { return kind == TokenKind::Symbol && text == s; }
  bool is_word(std::string_view s) const { return kind == TokenKind::Ident && text == s; }
};

std::string_view token_kind_name(TokenKind kind);

/// Splits `text` into tokens; the result always ends with an End token.
/// Throws ParseError on malformed input.
std::vector<Token> tokenize(std::string_view text, const std::string & file = {});

}  // namespace mdm
