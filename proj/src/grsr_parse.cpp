#include <map>

#include "lexer.hpp"
#include "memodag/grsr.hpp"

namespace memodag {

namespace {

using detail::Lexer;
using detail::Tok;
using detail::Token;

class GrsrParser {
 public:
  explicit GrsrParser(std::string_view text) : lex_(text) {}

  GrsrFile parse() {
    while (lex_.peek().kind != Tok::End) {
      if (lex_.at_ident("algebra")) {
        parse_algebra();
      } else if (lex_.at_ident("def")) {
        parse_def();
      } else {
        lex_.fail("expected 'algebra' or 'def'");
      }
    }
    return std::move(file_);
  }

 private:
  void parse_algebra() {
    lex_.expect_keyword("algebra");
    Token name = lex_.expect_ident("algebra name");
    if (file_.algebra(name.text)) Lexer::fail_at(name, "algebra " + name.text + " declared twice");
    lex_.expect_punct("=");
    auto a = std::make_shared<Algebra>();
    a->name = name.text;
    do {
      Token c = lex_.expect_ident("constructor");
      lex_.expect_punct("/");
      std::size_t k = lex_.expect_number();
      if (auto prev = constructor_arity(c.text); prev && *prev != k) {
        Lexer::fail_at(c, "constructor " + c.text + " redeclared with another arity");
      }
      a->constructors.emplace_back(Symbol::intern(c.text), k);
    } while (lex_.at_punct(",") && (lex_.next(), true));
    lex_.expect_punct(";");
    try {
      a->validate();
    } catch (const GrsrError& e) {
      Lexer::fail_at(name, e.what());
    }
    file_.algebras.push_back(std::move(a));
  }

  TierAnnotation parse_tier_annotation() {
    Token a = lex_.expect_ident("algebra name");
    if (!file_.algebra(a.text)) Lexer::fail_at(a, "unknown algebra " + a.text);
    TierAnnotation t{a.text, std::nullopt};
    if (lex_.at_punct("@")) {
      lex_.next();
      t.tier = static_cast<unsigned>(lex_.expect_number());
    }
    return t;
  }

  void parse_def() {
    lex_.expect_keyword("def");
    std::vector<Token> names{lex_.expect_ident("definition name")};
    while (lex_.at_punct(",")) {
      lex_.next();
      names.push_back(lex_.expect_ident("definition name"));
    }
    for (const auto& n : names) {
      if (bindings_.count(n.text)) Lexer::fail_at(n, "name " + n.text + " defined twice");
    }
    std::vector<TierAnnotation> inputs;
    std::optional<TierAnnotation> output;
    if (lex_.at_punct(":")) {
      lex_.next();
      if (!lex_.at_punct("->")) {
        inputs.push_back(parse_tier_annotation());
        while (lex_.at_ident("x") || lex_.at_punct("*")) {
          lex_.next();
          inputs.push_back(parse_tier_annotation());
        }
      }
      lex_.expect_punct("->");
      output = parse_tier_annotation();
    }
    Token eq = lex_.expect_punct("=");
    std::vector<std::string> hint;
    for (const auto& n : names) hint.push_back(n.text);
    hint_ = hint;
    FunctionExpr body = parse_expr();
    hint_.clear();
    lex_.expect_punct(";");

    if (names.size() > 1) {
      if (body.kind() != FunctionExpr::Kind::SimRec || body.components() != names.size()) {
        Lexer::fail_at(eq, "a definition with several names must be a recursion with that many components");
      }
    }
    if (output && inputs.size() != body.arity()) {
      Lexer::fail_at(eq, "signature lists " + std::to_string(inputs.size()) + " inputs but the function takes " +
                             std::to_string(body.arity()));
    }
    for (std::size_t k = 0; k < names.size(); ++k) {
      std::vector<std::string> component_names;
      for (const auto& n : names) component_names.push_back(n.text);
      GrsrDefinition d{names[k].text, names.size() > 1 ? body.with_select(k + 1) : body, inputs,
                       output ? *output : TierAnnotation{}, std::move(component_names)};
      bindings_.emplace(d.name, d.body);
      file_.definitions.push_back(std::move(d));
    }
  }

  std::optional<std::size_t> constructor_arity(const std::string& c) const {
    for (const auto& a : file_.algebras) {
      if (auto i = a->index_of(Symbol::intern(c))) return a->constructors[*i].second;
    }
    return std::nullopt;
  }

  std::shared_ptr<const Algebra> parse_algebra_ref() {
    Token a = lex_.expect_ident("algebra name");
    auto alg = file_.algebra(a.text);
    if (!alg) Lexer::fail_at(a, "unknown algebra " + a.text);
    return alg;
  }

  bool at_expr_end() const {
    const Token& t = lex_.peek();
    return t.kind == Tok::End || lex_.at_punct(";") || lex_.at_punct(",") || lex_.at_punct("}") ||
           lex_.at_punct(")") || lex_.at_ident("select");
  }

  template <class F>
  FunctionExpr guarded(const Token& at, F&& build) {
    try {
      return build();
    } catch (const GrsrError& e) {
      Lexer::fail_at(at, e.what());
    }
  }

  FunctionExpr parse_expr() {
    Token t = lex_.peek();
    if (lex_.at_ident("comp")) {
      hint_.clear();
      lex_.next();
      std::optional<std::size_t> arity;
      if (lex_.at_punct("[")) {
        lex_.next();
        arity = lex_.expect_number();
        lex_.expect_punct("]");
      }
      FunctionExpr f = parse_atom();
      std::vector<FunctionExpr> gs;
      while (!at_expr_end()) gs.push_back(parse_atom());
      return guarded(t, [&] { return FunctionExpr::composition(f, gs, arity); });
    }
    if (lex_.at_ident("case")) {
      std::vector<std::string> hint = take_hint();
      lex_.next();
      lex_.expect_keyword("over");
      auto alg = parse_algebra_ref();
      lex_.expect_punct("{");
      std::map<std::size_t, FunctionExpr> branches;
      while (!lex_.at_punct("}")) {
        std::size_t i = parse_branch_constructor(*alg);
        if (branches.count(i)) lex_.fail("duplicate branch");
        lex_.expect_punct("=>");
        branches.emplace(i, parse_expr());
        lex_.expect_punct(";");
      }
      lex_.expect_punct("}");
      std::vector<FunctionExpr> list;
      for (std::size_t i = 0; i < alg->constructors.size(); ++i) {
        auto it = branches.find(i);
        if (it == branches.end()) Lexer::fail_at(t, "missing branch for " + alg->constructors[i].first.name());
        list.push_back(it->second);
      }
      return guarded(t, [&] {
        return FunctionExpr::case_of(alg, list, hint.size() == 1 ? hint.front() : std::string{});
      });
    }
    if (lex_.at_ident("rec")) {
      std::vector<std::string> hint = take_hint();
      lex_.next();
      lex_.expect_keyword("over");
      auto alg = parse_algebra_ref();
      lex_.expect_punct("{");
      std::map<std::size_t, std::vector<FunctionExpr>> rows;
      while (!lex_.at_punct("}")) {
        std::size_t i = parse_branch_constructor(*alg);
        if (rows.count(i)) lex_.fail("duplicate branch");
        lex_.expect_punct("=>");
        std::vector<FunctionExpr> row{parse_expr()};
        while (lex_.at_punct(",")) {
          lex_.next();
          row.push_back(parse_expr());
        }
        rows.emplace(i, std::move(row));
        lex_.expect_punct(";");
      }
      lex_.expect_punct("}");
      std::size_t select = 1;
      if (lex_.at_ident("select")) {
        lex_.next();
        select = lex_.expect_number();
      }
      std::vector<std::vector<FunctionExpr>> grid;
      for (std::size_t i = 0; i < alg->constructors.size(); ++i) {
        auto it = rows.find(i);
        if (it == rows.end()) Lexer::fail_at(t, "missing branch for " + alg->constructors[i].first.name());
        grid.push_back(it->second);
      }
      std::size_t comps = grid.front().size();
      if (hint.size() != comps) hint.clear();
      return guarded(t, [&] { return FunctionExpr::simrec(alg, grid, select, hint); });
    }
    return parse_atom();
  }

  std::size_t parse_branch_constructor(const Algebra& alg) {
    Token c = lex_.expect_ident("constructor");
    auto i = alg.index_of(Symbol::intern(c.text));
    if (!i) Lexer::fail_at(c, c.text + " is not a constructor of " + alg.name);
    return *i;
  }

  // Name hints apply only to the outermost case or recursion of a definition.
  std::vector<std::string> take_hint() {
    std::vector<std::string> h = std::move(hint_);
    hint_.clear();
    return h;
  }

  FunctionExpr parse_atom() {
    Token t = lex_.peek();
    if (lex_.at_punct("(")) {
      lex_.next();
      FunctionExpr e = parse_expr();
      lex_.expect_punct(")");
      return e;
    }
    hint_.clear();
    if (lex_.at_ident("cons")) {
      lex_.next();
      lex_.expect_punct("[");
      Token c = lex_.expect_ident("constructor");
      lex_.expect_punct("]");
      auto k = constructor_arity(c.text);
      if (!k) Lexer::fail_at(c, "unknown constructor " + c.text);
      return FunctionExpr::constructor(Symbol::intern(c.text), *k);
    }
    if (lex_.at_ident("proj")) {
      lex_.next();
      std::size_t m = lex_.expect_number();
      std::size_t n = lex_.expect_number();
      return guarded(t, [&] { return FunctionExpr::projection(m, n); });
    }
    if (t.kind == Tok::Ident && t.text != "comp" && t.text != "case" && t.text != "rec") {
      lex_.next();
      auto it = bindings_.find(t.text);
      if (it == bindings_.end()) Lexer::fail_at(t, "unknown function " + t.text);
      return it->second;
    }
    if (t.kind == Tok::Ident) return parse_expr();
    lex_.fail("expected a function expression");
  }

  Lexer lex_;
  GrsrFile file_;
  std::map<std::string, FunctionExpr> bindings_;
  std::vector<std::string> hint_;
};

}  // namespace

GrsrFile parse_grsr(std::string_view text) { return GrsrParser(text).parse(); }

}  // namespace memodag
