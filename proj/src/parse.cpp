#include "memodag/parse.hpp"

#include <sstream>

#include "lexer.hpp"

namespace memodag {

namespace {

std::string position_prefix(std::size_t line, std::size_t column) {
  return std::to_string(line) + ":" + std::to_string(column) + ": ";
}

using detail::Lexer;
using detail::Tok;
using detail::Token;

Term parse_term(Lexer& lx, const Signature& sig, bool allow_variables) {
  Token name = lx.expect_ident("a symbol");
  Symbol sym = Symbol::intern(name.text);
  auto info = sig.lookup(sym);

  if (lx.at_punct("^")) {
    lx.next();
    std::size_t k = lx.expect_number();
    if (!info || info->arity != 1) Lexer::fail_at(name, "'^' needs a declared unary symbol");
    lx.expect_punct("(");
    Term inner = parse_term(lx, sig, allow_variables);
    lx.expect_punct(")");
    return iterate(sym, k, std::move(inner));
  }

  std::vector<Term> args;
  bool parenthesised = false;
  if (lx.at_punct("(")) {
    parenthesised = true;
    lx.next();
    if (!lx.at_punct(")")) {
      for (;;) {
        args.push_back(parse_term(lx, sig, allow_variables));
        if (!lx.at_punct(",")) break;
        lx.next();
      }
    }
    lx.expect_punct(")");
  }

  if (!info) {
    if (parenthesised) Lexer::fail_at(name, "undeclared symbol '" + name.text + "'");
    if (!allow_variables) Lexer::fail_at(name, "undeclared symbol '" + name.text + "' in a ground term");
    return Term::variable(sym);
  }
  if (args.size() != info->arity) {
    Lexer::fail_at(name, "arity mismatch: '" + name.text + "' takes " + std::to_string(info->arity) +
                             " argument(s), given " + std::to_string(args.size()));
  }
  return Term::apply(sym, std::move(args));
}

void parse_declarations(Lexer& lx, Signature& sig, SymbolKind kind) {
  if (lx.at_punct(";")) {
    lx.next();
    return;
  }
  for (;;) {
    Token name = lx.expect_ident("a symbol name");
    lx.expect_punct("/");
    std::size_t arity = lx.expect_number();
    try {
      if (kind == SymbolKind::Constructor) {
        sig.add_constructor(Symbol::intern(name.text), arity);
      } else {
        sig.add_operation(Symbol::intern(name.text), arity);
      }
    } catch (const std::invalid_argument& e) {
      Lexer::fail_at(name, e.what());
    }
    if (lx.at_punct(";")) {
      lx.next();
      return;
    }
    lx.expect_punct(",");
  }
}

}  // namespace

ParseError::ParseError(const std::string& message, std::size_t line, std::size_t column)
    : std::runtime_error(position_prefix(line, column) + message), line_(line), column_(column), detail_(message) {}

ProgramText parse_program_text(std::string_view text) {
  Lexer lx(text);
  ProgramText out;
  lx.expect_keyword("constructors");
  lx.expect_punct(":");
  parse_declarations(lx, out.signature, SymbolKind::Constructor);
  lx.expect_keyword("operations");
  lx.expect_punct(":");
  parse_declarations(lx, out.signature, SymbolKind::Operation);
  lx.expect_keyword("rules");
  lx.expect_punct(":");
  while (lx.peek().kind != Tok::End) {
    Term lhs = parse_term(lx, out.signature, true);
    lx.expect_punct("->");
    Term rhs = parse_term(lx, out.signature, true);
    lx.expect_punct(";");
    out.rules.push_back({std::move(lhs), std::move(rhs)});
  }
  return out;
}

Program parse_program(std::string_view text) {
  ProgramText parsed = parse_program_text(text);
  return Program(std::move(parsed.signature), std::move(parsed.rules));
}

Term parse_term(std::string_view text, const Signature& sig) {
  Lexer lx(text);
  Term t = parse_term(lx, sig, false);
  if (lx.peek().kind != Tok::End) lx.fail("unexpected trailing input");
  return t;
}

Term parse_open_term(std::string_view text, const Signature& sig) {
  Lexer lx(text);
  Term t = parse_term(lx, sig, true);
  if (lx.peek().kind != Tok::End) lx.fail("unexpected trailing input");
  return t;
}

}  // namespace memodag
