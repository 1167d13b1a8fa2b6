#pragma once

#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>

#include "memodag/parse.hpp"

namespace memodag::detail {

enum class Tok { Ident, Number, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::size_t line = 1;
  std::size_t column = 1;
};

/// Tokenizer shared by the program and combinator file formats.
/// Identifiers: [A-Za-z_#][A-Za-z0-9_#']*. Punctuation includes the
/// two-character arrows "->" and "=>". "//" starts a line comment.
class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) { advance(); }

  const Token& peek() const { return current_; }

  Token next() {
    Token t = current_;
    advance();
    return t;
  }

  bool at_punct(std::string_view p) const { return current_.kind == Tok::Punct && current_.text == p; }
  bool at_ident(std::string_view w) const { return current_.kind == Tok::Ident && current_.text == w; }

  Token expect_punct(std::string_view p) {
    if (!at_punct(p)) fail("expected '" + std::string(p) + "'");
    return next();
  }

  Token expect_ident(std::string_view what = "identifier") {
    if (current_.kind != Tok::Ident) fail("expected " + std::string(what));
    return next();
  }

  void expect_keyword(std::string_view w) {
    if (!at_ident(w)) fail("expected '" + std::string(w) + "'");
    next();
  }

  std::size_t expect_number() {
    if (current_.kind != Tok::Number) fail("expected a number");
    return std::stoull(next().text);
  }

  [[noreturn]] void fail(const std::string& message) const { fail_at(current_, message); }

  [[noreturn]] static void fail_at(const Token& t, const std::string& message) {
    std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw ParseError(message + ", found " + found, t.line, t.column);
  }

 private:
  static bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '#'; }
  static bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '#' || c == '\'';
  }

  void bump() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void advance() {
    for (;;) {
      while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) bump();
      if (pos_ + 1 < text_.size() && text_[pos_] == '/' && text_[pos_ + 1] == '/') {
        while (pos_ < text_.size() && text_[pos_] != '\n') bump();
        continue;
      }
      break;
    }
    current_ = Token{};
    current_.line = line_;
    current_.column = column_;
    if (pos_ >= text_.size()) return;
    std::size_t start = pos_;
    char c = text_[pos_];
    if (ident_start(c)) {
      while (pos_ < text_.size() && ident_char(text_[pos_])) bump();
      current_.kind = Tok::Ident;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) bump();
      current_.kind = Tok::Number;
    } else {
      current_.kind = Tok::Punct;
      bump();
      if (pos_ < text_.size() && (c == '-' || c == '=') && text_[pos_] == '>') bump();
    }
    current_.text = std::string(text_.substr(start, pos_ - start));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
  Token current_;
};

}  // namespace memodag::detail
