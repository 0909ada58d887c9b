#include "microdep/java_lexer.hpp"

#include <cctype>

namespace microdep {

namespace {

bool ident_start(unsigned char c) {
  return std::isalpha(c) || c == '_' || c == '$' || c >= 0x80;
}

bool ident_part(unsigned char c) { return ident_start(c) || std::isdigit(c); }

class Lexer {
public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '\n') {
        ++line_;
        ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '/' && peek(1) == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n')
          ++pos_;
      } else if (c == '/' && peek(1) == '*') {
        block_comment();
      } else if (c == '"' && peek(1) == '"' && peek(2) == '"') {
        text_block();
      } else if (c == '"' || c == '\'') {
        quoted(c);
      } else if (ident_start(static_cast<unsigned char>(c))) {
        auto start = pos_;
        while (pos_ < src_.size() && ident_part(static_cast<unsigned char>(src_[pos_])))
          ++pos_;
        emit(TokenKind::identifier, std::string(src_.substr(start, pos_ - start)));
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        auto start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                src_[pos_] == '_' || src_[pos_] == '.'))
          ++pos_;
        emit(TokenKind::number, std::string(src_.substr(start, pos_ - start)));
      } else {
        emit(TokenKind::punct, std::string(1, c));
        ++pos_;
      }
    }
    return std::move(tokens_);
  }

private:
  char peek(std::size_t ahead) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  void emit(TokenKind kind, std::string text) {
    tokens_.push_back({kind, std::move(text), line_});
  }

  void block_comment() {
    pos_ += 2;
    while (pos_ < src_.size()) {
      if (src_[pos_] == '*' && peek(1) == '/') {
        pos_ += 2;
        return;
      }
      if (src_[pos_] == '\n')
        ++line_;
      ++pos_;
    }
  }

  // Appends the character(s) an escape sequence stands for. Unicode escapes
  // are kept verbatim.
  void escape(std::string& value) {
    char e = peek(1);
    pos_ += 2;
    switch (e) {
    case 'n': value.push_back('\n'); break;
    case 't': value.push_back('\t'); break;
    case 'r': value.push_back('\r'); break;
    case 'b': value.push_back('\b'); break;
    case 'f': value.push_back('\f'); break;
    case 's': value.push_back(' '); break;
    case '\n':
      // Line continuation inside a text block.
      ++line_;
      break;
    case '\0': break;
    case 'u':
      value.append("\\u");
      break;
    default:
      value.push_back(e);
    }
  }

  void quoted(char quote) {
    auto start_line = line_;
    std::string value;
    ++pos_;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == quote) {
        ++pos_;
        break;
      }
      if (c == '\n')
        break;
      if (c == '\\' && peek(1) != '\n') {
        escape(value);
        continue;
      }
      value.push_back(c);
      ++pos_;
    }
    tokens_.push_back({quote == '"' ? TokenKind::string_literal : TokenKind::char_literal,
                       std::move(value), start_line});
  }

  void text_block() {
    auto start_line = line_;
    pos_ += 3;
    // Opening delimiter is followed by optional blanks and a line break.
    while (pos_ < src_.size() && src_[pos_] != '\n' &&
           std::isspace(static_cast<unsigned char>(src_[pos_])))
      ++pos_;
    if (pos_ < src_.size() && src_[pos_] == '\n') {
      ++line_;
      ++pos_;
    }
    std::string value;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '"' && peek(1) == '"' && peek(2) == '"') {
        pos_ += 3;
        break;
      }
      if (c == '\\') {
        escape(value);
        continue;
      }
      if (c == '\n')
        ++line_;
      value.push_back(c);
      ++pos_;
    }
    tokens_.push_back({TokenKind::string_literal, std::move(value), start_line});
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::vector<Token> tokens_;
};

} // namespace

std::vector<Token> tokenize_java(std::string_view source) {
  return Lexer(source).run();
}

} // namespace microdep
