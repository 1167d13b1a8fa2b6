#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "memodag/program.hpp"

namespace memodag {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& detail() const { return detail_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string detail_;
};

/// Signature and rules as written, before the orthogonality check.
struct ProgramText {
  Signature signature;
  std::vector<Rule> rules;
};

/// Parses the program format. Syntax and arity errors throw ParseError.
///
///   constructors: zero/0, suc/1 ;
///   operations:   add/2 ;
///   rules:
///     add(zero, y)   -> y ;
///     add(suc(x), y) -> suc(add(x, y)) ;
///
/// Undeclared identifiers without arguments are variables. f^k(t) abbreviates
/// k applications of a unary symbol f.
ProgramText parse_program_text(std::string_view text);

/// parse_program_text followed by the orthogonality check (ProgramError).
Program parse_program(std::string_view text);

/// Ground term over the signature; variables are rejected.
Term parse_term(std::string_view text, const Signature& sig);

/// Term over the signature where undeclared identifiers are variables.
Term parse_open_term(std::string_view text, const Signature& sig);

}  // namespace memodag
