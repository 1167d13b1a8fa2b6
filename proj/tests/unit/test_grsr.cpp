#include <doctest.h>

#include "memodag/grsr.hpp"
#include "memodag/parse.hpp"
#include "support.hpp"

using namespace memodag;
using namespace memodag::testing;

namespace {

Term leafn() { return Term::apply(sym("leafn"), {}); }
Term leafm() { return Term::apply(sym("leafm"), {}); }

const GrsrDefinition& def(const GrsrFile& f, const char* name) {
  const GrsrDefinition* d = f.definition(name);
  REQUIRE(d != nullptr);
  return *d;
}

std::string rules_text(const Program& p) { return pretty_print(p); }

}  // namespace

TEST_SUITE("grsr") {
  TEST_CASE("eval examples") {
    GrsrFile add = load_grsr("add.grsr");
    std::vector<Term> one_one{num(1), num(1)};
    CHECK(eval_grsr(def(add, "add").body, one_one) == num(2));

    GrsrFile rab = load_grsr("rabbits.grsr");
    std::vector<Term> zero{num(0)};
    CHECK(eval_grsr(def(rab, "adults").body, zero) == leafm());
    CHECK(eval_grsr(def(rab, "babies").body, zero) == leafn());
    CHECK(eval_grsr(def(rab, "rabbits").body, zero) == leafn());

    GrsrFile leafs = load_grsr("leafs.grsr");
    std::vector<Term> tree{Term::apply(sym("m"), {leafm(), leafn()})};
    CHECK(eval_grsr(def(leafs, "leafs").body, tree) == num(2));
  }

  TEST_CASE("eval rejects bad arguments") {
    GrsrFile add = load_grsr("add.grsr");
    std::vector<Term> one{num(1)};
    CHECK_THROWS_AS(eval_grsr(def(add, "add").body, one), GrsrError);
    std::vector<Term> foreign{leafn(), num(0)};
    CHECK_THROWS_AS(eval_grsr(def(add, "add").body, foreign), GrsrError);
  }

  TEST_CASE("basic combinators") {
    FunctionExpr suc = FunctionExpr::constructor(sym("suc"), 1);
    std::vector<Term> z{num(0)};
    CHECK(eval_grsr(suc, z) == num(1));
    FunctionExpr p = FunctionExpr::projection(3, 2);
    std::vector<Term> three{num(0), num(1), num(2)};
    CHECK(eval_grsr(p, three) == num(1));
    FunctionExpr c = FunctionExpr::composition(suc, {p});
    CHECK(c.arity() == 3);
    CHECK(eval_grsr(c, three) == num(2));
    CHECK(to_string(c) == "comp cons[suc] (proj 3 2)");
  }

  TEST_CASE("compiled adults rules") {
    GrsrFile rab = load_grsr("rabbits.grsr");
    CompiledFunction cf = compile(def(rab, "adults").body, "adults", rab.algebras);
    CHECK(cf.entry == sym("adults"));
    std::string text = rules_text(cf.program);
    CHECK(text.find("adults(zero) -> leafm ;") != std::string::npos);
    CHECK(text.find("adults(suc(x1)) -> m(adults(x1), babies(x1)) ;") != std::string::npos);
    CHECK(text.find("babies(suc(x1)) -> n(adults(x1)) ;") != std::string::npos);
  }

  TEST_CASE("a constructor compiles to one wrapper rule") {
    CompiledFunction cf = compile(FunctionExpr::constructor(sym("suc"), 1));
    CHECK(cf.entry == sym("f_suc"));
    CHECK(cf.program.rules().size() == 1);
    CHECK(rules_text(cf.program).find("f_suc(x1) -> suc(x1) ;") != std::string::npos);
  }

  TEST_CASE("compiled add agrees with the oracle on small pairs") {
    GrsrFile add = load_grsr("add.grsr");
    const FunctionExpr& f = def(add, "add").body;
    CompiledFunction cf = compile(f, "add", add.algebras);
    for (std::size_t i = 0; i <= 6; ++i) {
      for (std::size_t j = 0; j <= 6; ++j) {
        std::vector<Term> args{num(i), num(j)};
        Term expected = eval_grsr(f, args);
        CHECK(expected == num(i + j));
        Term call = Term::apply(cf.entry, args);
        CHECK(eval_cbv(cf.program, call, 100000).value == expected);
        CHECK(eval_memo(cf.program, TermCache{}, call).value == expected);
      }
    }
  }

  TEST_CASE("compiled corpus functions are orthogonal with shallow patterns") {
    for (const char* file : {"add.grsr", "rabbits.grsr", "leafs.grsr", "tree.grsr", "mult.grsr"}) {
      GrsrFile g = load_grsr(file);
      for (const GrsrDefinition& d : g.definitions) {
        CompiledFunction cf = compile(d.body, d.name, g.algebras);
        CHECK(cf.entry == Symbol::intern(d.name));
        CHECK(orthogonality_violations(cf.program.signature(), cf.program.rules()).empty());
        for (const Rule& r : cf.program.rules()) {
          CHECK(term_depth(r.lhs) <= 2);
        }
      }
    }
  }

  TEST_CASE("shared recursion grids compile once") {
    GrsrFile leafs = load_grsr("leafs.grsr");
    CompiledFunction cf = compile(def(leafs, "leafs").body, "leafs", leafs.algebras);
    CHECK(cf.program.signature().operations().size() == 2);
    GrsrFile rab = load_grsr("rabbits.grsr");
    CHECK(count_simrec_nodes(def(rab, "rabbits").body) == 1);
    CHECK(def(rab, "adults").body.with_select(2) == def(rab, "babies").body);
  }

  TEST_CASE("parse errors carry positions") {
    CHECK_THROWS_AS(parse_grsr("algebra N = zero/0, suc/1 ;\ndef f = proj 1 ;"), ParseError);
    CHECK_THROWS_AS(parse_grsr("def f = cons[zero] ;"), ParseError);
    CHECK_THROWS_AS(parse_grsr("algebra N = suc/1 ;"), std::exception);
    CHECK_THROWS_AS(parse_grsr("algebra N = zero/0, suc/1 ;\ndef f = case over N { zero => proj 1 1 ; } ;"),
                    std::exception);
    try {
      parse_grsr("algebra N = zero/0, suc/1 ;\ndef f = @ ;");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
  }
}
