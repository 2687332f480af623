// src/lexer.cpp - Tokenizer
#include "mdm/lexer.hpp"

#include <array>
#include <charconv>
#include <cctype>

#include "mdm/errors.hpp"

namespace mdm
{

std::string_view token_kind_name(TokenKind kind)
{
  switch (kind) {
    case TokenKind::Ident:
      return "identifier";
    case TokenKind::Int:
      return "integer";
    case TokenKind::Real:
      return "number";
    case TokenKind::Duration:
      return "duration";
    case TokenKind::String:
      return "string";
    case TokenKind::Symbol:
      return "symbol";
    case TokenKind::End:
      return "end of input";
  }
  return "?";
}

namespace
{

constexpr std::array<std::string_view, 9> kTwoCharSymbols = {":=", "->", "==", "!=", "<=",
                                                             ">=", "&&", "||", "=>"};
constexpr std::string_view kOneCharSymbols = "{}()[],;:<>+-*/!";

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return c >= '0' && c <= '9'; }

class Lexer
{
public:
  Lexer(std::string_view text, const std::string & file) : text_(text), file_(file) {}

  std::vector<Token> run()
  {
    std::vector<Token> out;
    while (true) {
      skip_trivia();
      Token tok;
      tok.span = here();
      if (pos_ >= text_.size()) {
        tok.kind = TokenKind::End;
        out.push_back(std::move(tok));
        return out;
      }
      const char c = text_[pos_];
      const std::size_t start = pos_;
      if (ident_start(c)) {
        while (pos_ < text_.size() && ident_char(text_[pos_])) advance();
        tok.kind = TokenKind::Ident;
        tok.text = std::string(text_.substr(start, pos_ - start));
      } else if (digit(c)) {
        lex_number(tok);
      } else if (c == '"') {
        lex_string(tok);
      } else {
        lex_symbol(tok);
      }
      tok.span.length = static_cast<std::uint32_t>(pos_ - start);
      out.push_back(std::move(tok));
    }
  }

private:
  SourceSpan here() const { return SourceSpan{file_, line_, column_, 0}; }

  void advance()
  {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  [[noreturn]] void fail(const std::string & message) const { throw ParseError(message, here()); }

  void skip_trivia()
  {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else {
        return;
      }
    }
  }

  void lex_number(Token & tok)
  {
    const std::size_t start = pos_;
    bool is_real = false;
    while (pos_ < text_.size() && digit(text_[pos_])) advance();
    if (pos_ + 1 < text_.size() && text_[pos_] == '.' && digit(text_[pos_ + 1])) {
      is_real = true;
      advance();
      while (pos_ < text_.size() && digit(text_[pos_])) advance();
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
      if (look < text_.size() && digit(text_[look])) {
        is_real = true;
        while (pos_ < look) advance();
        while (pos_ < text_.size() && digit(text_[pos_])) advance();
      }
    }
    const std::string_view spelling = text_.substr(start, pos_ - start);
    tok.text = std::string(spelling);

    double as_double = 0.0;
    {
      auto [ptr, ec] = std::from_chars(spelling.data(), spelling.data() + spelling.size(), as_double);
      if (ec != std::errc() || ptr != spelling.data() + spelling.size()) {
        fail("malformed number '" + tok.text + "'");
      }
    }
    tok.number = as_double;

    const bool duration_suffix =
      pos_ < text_.size() && text_[pos_] == 's' &&
      (pos_ + 1 >= text_.size() || !ident_char(text_[pos_ + 1]));
    if (duration_suffix) {
      advance();
      tok.kind = TokenKind::Duration;
      return;
    }
    if (is_real) {
      tok.kind = TokenKind::Real;
      return;
    }
    std::int64_t as_int = 0;
    auto [ptr, ec] = std::from_chars(spelling.data(), spelling.data() + spelling.size(), as_int);
    if (ec != std::errc() || ptr != spelling.data() + spelling.size()) {
      fail("integer literal out of range '" + tok.text + "'");
    }
    tok.kind = TokenKind::Int;
    tok.integer = as_int;
  }

  void lex_string(Token & tok)
  {
    advance();  // opening quote
    std::string value;
    while (true) {
      if (pos_ >= text_.size() || text_[pos_] == '\n') fail("unterminated string literal");
      const char c = text_[pos_];
      if (c == '"') {
        advance();
        break;
      }
      if (c == '\\') {
        advance();
        if (pos_ >= text_.size()) fail("unterminated string literal");
        const char e = text_[pos_];
        if (e != '"' && e != '\\') fail("unsupported escape sequence");
        value.push_back(e);
        advance();
        continue;
      }
      value.push_back(c);
      advance();
    }
    tok.kind = TokenKind::String;
    tok.text = std::move(value);
  }

  void lex_symbol(Token & tok)
  {
    const std::string_view rest = text_.substr(pos_);
    for (auto sym : kTwoCharSymbols) {
      if (rest.substr(0, 2) == sym) {
        advance();
        advance();
        tok.kind = TokenKind::Symbol;
        tok.text = std::string(sym);
        return;
      }
    }
    if (kOneCharSymbols.find(rest.front()) != std::string_view::npos) {
      tok.kind = TokenKind::Symbol;
      tok.text = std::string(1, rest.front());
      advance();
      return;
    }
    const auto byte = static_cast<unsigned char>(rest.front());
    if (byte < 0x20 || byte >= 0x7f) {
      fail("unexpected byte 0x" + std::string(1, "0123456789abcdef"[byte >> 4]) +
           std::string(1, "0123456789abcdef"[byte & 15]));
    }
    fail(std::string("unexpected character '") + rest.front() + "'");
  }

  std::string_view text_;
  const std::string & file_;
  std::size_t pos_ = 0;
  std::uint32_t line_ = 1;
  std::uint32_t column_ = 1;
};

}  // namespace

std::vector<Token> tokenize(std::string_view text, const std::string & file)
{
  return Lexer(text, file).run();
}

}  // namespace mdm
