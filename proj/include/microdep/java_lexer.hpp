#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace microdep {

enum class TokenKind { identifier, string_literal, char_literal, number, punct };

/// A Java token. String literals (including text blocks) carry their decoded
/// value in `text`; punctuation is one character per token.
struct Token {
  TokenKind kind;
  std::string text;
  std::size_t line;

  bool is_punct(char c) const {
    return kind == TokenKind::punct && text.size() == 1 && text[0] == c;
  }
  bool is_ident(std::string_view name) const {
    return kind == TokenKind::identifier && text == name;
  }
};

/// Splits Java source into tokens, dropping whitespace and comments. Never
/// throws: malformed input (an unterminated literal or comment) ends the
/// affected token at the end of the line or file.
std::vector<Token> tokenize_java(std::string_view source);

} // namespace microdep
