#include <doctest.h>

#include <random>

#include "memodag/parse.hpp"
#include "memodag/program.hpp"
#include "support.hpp"

using namespace memodag;
using namespace memodag::testing;

namespace {

bool has_kind(const std::vector<Violation>& vs, Violation::Kind k) {
  for (const auto& v : vs) {
    if (v.kind == k) return true;
  }
  return false;
}

std::vector<Violation> violations_of(const std::string& text) {
  ProgramText pt = parse_program_text(text);
  return orthogonality_violations(pt.signature, pt.rules);
}

}  // namespace

TEST_SUITE("program") {
  TEST_CASE("the adults rules parse") {
    Program p = parse_program(
        "constructors: zero/0, suc/1, leafm/0, m/2, n/1, leafn/0 ;\n"
        "operations: adults/1, babies/1 ;\n"
        "rules:\n"
        "  adults(zero) -> leafm ;\n"
        "  adults(suc(x)) -> m(adults(x), babies(x)) ;\n");
    CHECK(p.rules().size() == 2);
    CHECK(p.signature().constructors().size() == 6);
    CHECK(p.signature().is_operation(sym("adults")));
    CHECK(p.signature().arity(sym("m")) == 2);
  }

  TEST_CASE("overlapping left-hand sides are rejected naming both rules") {
    const std::string text =
        "constructors: zero/0 ;\noperations: f/1 ;\nrules:\n  f(x) -> x ;\n  f(zero) -> zero ;\n";
    auto vs = violations_of(text);
    REQUIRE(has_kind(vs, Violation::Kind::Ambiguity));
    CHECK(vs.front().message.find("f(x) -> x") != std::string::npos);
    CHECK(vs.front().message.find("f(zero) -> zero") != std::string::npos);
    CHECK_THROWS_AS(parse_program(text), ProgramError);
  }

  TEST_CASE("non-linear left-hand sides are rejected") {
    auto vs = violations_of("constructors: zero/0 ;\noperations: g/2 ;\nrules:\n  g(x, x) -> x ;\n");
    CHECK(has_kind(vs, Violation::Kind::Linearity));
  }

  TEST_CASE("free right-hand side variables and non-constructor patterns are rejected") {
    CHECK(has_kind(violations_of("constructors: zero/0 ;\noperations: f/1 ;\nrules:\n  f(x) -> y ;\n"),
                   Violation::Kind::FreeVariable));
    CHECK(has_kind(violations_of("constructors: zero/0 ;\noperations: f/1, g/1 ;\nrules:\n  f(g(x)) -> x ;\n"),
                   Violation::Kind::Shape));
  }

  TEST_CASE("syntax and arity errors carry positions") {
    try {
      parse_program("constructors: zero/0 ;\noperations: f/1 ;\nrules:\n  f(zero, zero) -> zero ;\n");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 4);
    }
    try {
      parse_program("constructors: zero/0 ;\noperations: f/1 ;\nrules:\n  f(zero) => zero ;\n");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 4);
      CHECK(e.column() > 1);
    }
    CHECK_THROWS_AS(parse_program("constructors: zero/0, zero/1 ;\noperations: ;\nrules:\n"), ParseError);
  }

  TEST_CASE("suc^k shorthand expands") {
    Program p = load_program("add.trs");
    CHECK(parse(p, "suc^5(zero)") == num(5));
    CHECK(parse(p, "add(suc^2(zero), zero)") == Term::apply(sym("add"), {num(2), num(0)}));
    CHECK_THROWS_AS(parse(p, "add(x, zero)"), ParseError);
    CHECK_THROWS_AS(parse(p, "add^2(zero)"), ParseError);
  }

  TEST_CASE("program_delta") {
    CHECK(program_delta(load_program("rabbits.trs")) == 5);
    CHECK(program_delta(parse_program("constructors: zero/0 ;\noperations: f/1 ;\nrules:\n  f(x) -> x ;\n")) == 1);
    CHECK(program_delta(load_program("tree.trs")) == 3);
    CHECK_THROWS_AS(program_delta(parse_program("constructors: zero/0 ;\noperations: f/1 ;\nrules:\n")),
                    std::invalid_argument);
  }

  TEST_CASE("pretty_print round trips through the parser") {
    for (const char* f : {"add.trs", "tree.trs", "rabbits.trs", "leafs.trs", "id.trs"}) {
      Program p = load_program(f);
      Program q = parse_program(pretty_print(p));
      CHECK(pretty_print(q) == pretty_print(p));
      REQUIRE(q.rules().size() == p.rules().size());
      for (std::size_t i = 0; i < p.rules().size(); ++i) {
        CHECK(q.rules()[i].lhs == p.rules()[i].lhs);
        CHECK(q.rules()[i].rhs == p.rules()[i].rhs);
      }
    }
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
      RandomProgram rp = random_program(seed);
      CHECK(pretty_print(parse_program(pretty_print(rp.program))) == pretty_print(rp.program));
    }
  }

  TEST_CASE("the corpus programs are orthogonal") {
    for (const char* f : {"add.trs", "tree.trs", "rabbits.trs", "leafs.trs", "id.trs"}) {
      ProgramText pt = parse_program_text(read_text(corpus_path(f)));
      CHECK(orthogonality_violations(pt.signature, pt.rules).empty());
    }
  }

  TEST_CASE("overlap check agrees with brute-force instantiation") {
    ConstructorSet cs{{sym("a"), 0}, {sym("s"), 1}, {sym("p"), 2}};
    auto patterns = patterns_of_depth(cs, 2);
    auto values = values_of_depth(cs, 3);
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<std::size_t> pick(0, patterns.size() - 1);
    Signature sig;
    for (auto [c, k] : cs) sig.add_constructor(c, k);
    sig.add_operation(sym("f"), 1);
    int overlaps = 0;
    for (int i = 0; i < 1500; ++i) {
      const Term& p = patterns[pick(rng)];
      const Term& q = patterns[pick(rng)];
      bool brute = false;
      for (const auto& v : values) {
        if (match_term(p, v) && match_term(q, v)) {
          brute = true;
          break;
        }
      }
      CHECK(patterns_overlap(p, q) == brute);
      std::vector<Rule> rules{{Term::apply(sym("f"), {p}), Term::apply(sym("a"))},
                              {Term::apply(sym("f"), {q}), Term::apply(sym("a"))}};
      CHECK(has_kind(orthogonality_violations(sig, rules), Violation::Kind::Ambiguity) == brute);
      overlaps += brute;
    }
    CHECK(overlaps > 100);
    CHECK(overlaps < 1400);
  }

  TEST_CASE("random programs are orthogonal by construction") {
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
      RandomProgram rp = random_program(seed);
      ProgramText pt = parse_program_text(rp.text);
      CHECK(orthogonality_violations(pt.signature, pt.rules).empty());
    }
  }
}
