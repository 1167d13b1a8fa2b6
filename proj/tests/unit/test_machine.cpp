#include <doctest.h>

#include <sstream>

#include "memodag/machine.hpp"
#include "support.hpp"

using namespace memodag;
using namespace memodag::testing;

namespace {

Expression loc(std::uint32_t i) { return Expression::location(Location{i}); }

Program id_program() { return load_program("id.trs"); }

std::vector<std::pair<const char*, std::vector<Term>>> corpus_calls() {
  std::vector<std::pair<const char*, std::vector<Term>>> out;
  for (std::size_t n = 0; n <= 8; ++n) {
    out.push_back({"add.trs", {Term::apply(sym("add"), {num(n), num(8 - n)})}});
    out.push_back({"tree.trs", {Term::apply(sym("tree"), {num(n)})}});
    out.push_back({"rabbits.trs", {Term::apply(sym("rabbits"), {num(n)})}});
    out.push_back({"leafs.trs", {Term::apply(sym("fib"), {num(n)})}});
    out.push_back({"id.trs", {Term::apply(sym("id"), {num(n)})}});
  }
  return out;
}

}  // namespace

TEST_SUITE("machine") {
  TEST_CASE("decompose examples") {
    CHECK_FALSE(decompose(loc(0)));
    Expression e = Expression::construct(sym("suc"), {Expression::call(sym("f"), {loc(0)})});
    auto d = decompose(e);
    REQUIRE(d);
    CHECK(d->path == std::vector<std::size_t>{0});
    CHECK(render_context(e, d->path) == "suc(□)");
    Expression a = Expression::annotation(
        sym("f"), {Location{0}},
        Expression::construct(sym("c"), {loc(1), Expression::call(sym("g"), {loc(2)})}));
    auto da = decompose(a);
    REQUIRE(da);
    CHECK(render_context(a, da->path) == "f<@0>{c(@1, □)}");
    CHECK(to_string(subexpression(a, da->path)) == "g(@2)");
  }

  TEST_CASE("unfold_expression and weight") {
    Heap h;
    h.merge(sym("zero"), {});
    CHECK(unfold_expression(h, loc(0)) == num(0));
    Expression ann = Expression::annotation(sym("f"), {Location{0}}, Expression::call(sym("g"), {loc(0)}));
    CHECK(unfold_expression(h, ann) == Term::apply(sym("g"), {num(0)}));
    Expression s = Expression::construct(sym("suc"), {Expression::call(sym("f"), {loc(0)})});
    CHECK(unfold_expression(h, s) == Term::apply(sym("suc"), {Term::apply(sym("f"), {num(0)})}));
    CHECK(expression_weight(loc(0)) == 0);
    CHECK(expression_weight(Expression::call(sym("f"), {loc(0), loc(1)})) == 1);
    CHECK(expression_weight(Expression::annotation(sym("f"), {Location{0}}, Expression::construct(sym("suc"), {loc(1)}))) == 2);
    CHECK(expression_size(Expression::call(sym("f"), {loc(0), loc(1)})) == 3);
  }

  TEST_CASE("apply then store on the identity rule") {
    Program p = id_program();
    Configuration c{RefCache{}, Heap{}, Expression{}};
    c.heap.merge(sym("zero"), {});
    c.expr = Expression::call(sym("id"), {loc(0)});
    auto s1 = step(c, p);
    REQUIRE(s1);
    CHECK(s1->second == StepKind::Apply);
    CHECK(to_string(s1->first.expr) == "id<@0>{@0}");
    auto s2 = step(s1->first, p);
    REQUIRE(s2);
    CHECK(s2->second == StepKind::Store);
    CHECK(s2->first.expr == loc(0));
    CHECK(s2->first.cache.find(RefCall{sym("id"), {Location{0}}}) == Location{0});
    CHECK_FALSE(step(s2->first, p));
    RunResult r = run(p, c.heap, c.expr);
    CHECK(r.stats.applies == 1);
    CHECK(r.stats.total == 2);
  }

  TEST_CASE("read and merge steps") {
    Program p = id_program();
    Configuration c{RefCache{}, Heap{}, Expression{}};
    c.heap.merge(sym("zero"), {});
    c.heap.merge(sym("suc"), std::vector<Location>{Location{0}});
    c.cache.insert(RefCall{sym("id"), {Location{0}}}, Location{1});
    c.expr = Expression::call(sym("id"), {loc(0)});
    auto r = step(c, p);
    REQUIRE(r);
    CHECK(r->second == StepKind::Read);
    CHECK(r->first.expr == loc(1));
    CHECK(r->first.cache.size() == 1);

    Configuration m{RefCache{}, Heap{}, Expression{}};
    m.heap.merge(sym("zero"), {});
    m.expr = Expression::construct(sym("suc"), {loc(0)});
    auto s = step(m, p);
    REQUIRE(s);
    CHECK(s->second == StepKind::Merge);
    CHECK(s->first.expr == loc(1));
    CHECK(s->first.heap.at(Location{1}).constructor == sym("suc"));
  }

  TEST_CASE("check_well_formed clauses") {
    Program p = load_program("rabbits.trs");
    CHECK(check_well_formed(initial_configuration(p, Heap{}, parse(p, "rabbits(suc^3(zero))"))).empty());
    Configuration dup{RefCache{}, Heap::from_nodes({{sym("zero"), {}}, {sym("zero"), {}}}), loc(0)};
    auto v1 = check_well_formed(dup);
    REQUIRE(v1.size() == 1);
    CHECK(v1[0].clause == 1);
    Configuration clash{RefCache{}, Heap{}, Expression{}};
    clash.heap.merge(sym("zero"), {});
    clash.heap.merge(sym("leafn"), {});
    clash.heap.merge(sym("leafm"), {});
    clash.cache.insert(RefCall{sym("f"), {Location{0}}}, Location{2});
    clash.expr = Expression::annotation(sym("f"), {Location{0}}, loc(1));
    auto v2 = check_well_formed(clash);
    REQUIRE(v2.size() == 1);
    CHECK(v2[0].clause == 2);
    Configuration dangling{RefCache{}, Heap{}, loc(4)};
    auto v3 = check_well_formed(dangling);
    REQUIRE(v3.size() == 1);
    CHECK(v3[0].clause == 3);
  }

  TEST_CASE("stuck calls are reported at apply time") {
    Program partial = parse_program(
        "constructors: zero/0, suc/1 ;\noperations: pred/1 ;\nrules:\n  pred(suc(x)) -> x ;\n");
    Configuration c = initial_configuration(partial, Heap{}, parse(partial, "pred(zero)"));
    try {
      run(partial, c.heap, c.expr);
      FAIL("expected a stuck call");
    } catch (const EvalError& e) {
      CHECK(e.kind() == EvalError::Kind::Stuck);
      CHECK(e.engine() == "shared");
    }
    Program add = load_program("add.trs");
    Configuration big = initial_configuration(add, Heap{}, parse(add, "add(suc^50(zero), zero)"));
    CHECK_THROWS_AS(run(add, big.heap, big.expr, 10), EvalError);
  }

  TEST_CASE("the rabbit DAG of generation six") {
    Program p = load_program("rabbits.trs");
    Configuration c = initial_configuration(p, Heap{}, parse(p, "rabbits(suc^6(zero))"));
    RunResult r = run(p, c.heap, c.expr);
    CHECK(reachable_count(r.final.heap, r.answer()) == 10);
    CHECK(unfold(r.final.heap, r.answer()) == eval_cbv(p, parse(p, "rabbits(suc^6(zero))"), 100000).value);
  }

  TEST_CASE("tree answers have n+1 shared nodes") {
    Program p = load_program("tree.trs");
    for (std::size_t n = 0; n <= 10; ++n) {
      Configuration c = initial_configuration(p, Heap{}, Term::apply(sym("tree"), {num(n)}));
      RunResult r = run(p, c.heap, c.expr);
      CHECK(reachable_count(r.final.heap, r.answer()) == n + 1);
      CHECK(term_size(unfold(r.final.heap, r.answer())) == (std::uint64_t{1} << (n + 1)) - 1);
    }
  }

  TEST_CASE("lemmas hold along corpus traces") {
    for (const auto& [file, calls] : corpus_calls()) {
      Program p = load_program(file);
      const std::uint64_t delta = p.delta();
      for (const auto& call : calls) {
        TracedRun t = traced_run(p, call);
        REQUIRE(t.configs.size() == t.kinds.size() + 1);
        for (std::size_t i = 0; i < t.kinds.size(); ++i) {
          const Configuration& a = t.configs[i];
          const Configuration& b = t.configs[i + 1];
          const auto wa = expression_weight(a.expr), wb = expression_weight(b.expr);
          if (t.kinds[i] == StepKind::Apply) {
            CHECK(wb <= wa + delta);
          } else {
            CHECK(wb < wa);
          }
          CHECK(configuration_size(b) <= configuration_size(a) + delta);
          CHECK(check_well_formed(b).empty());
          for (std::uint32_t l = 0; l < a.heap.size(); ++l) {
            CHECK(b.heap.at(Location{l}) == a.heap.at(Location{l}));
          }
          auto d = decompose(a.expr);
          REQUIRE(d);
          CHECK(all_decompositions(a.expr) == std::vector<Decomposition>{*d});
          CHECK(applicable_rules(a, p).size() == 1);
        }
        CHECK(t.stats.total <= (1 + delta) * t.stats.applies + t.stats.initial_weight);
        CHECK(t.stats.total == t.stats.applies + t.stats.reads + t.stats.stores + t.stats.merges);
        CostedOutcome memo = eval_memo(p, TermCache{}, call);
        CHECK(t.stats.applies == memo.cost);
        CHECK(unfold(t.configs.back().heap, t.configs.back().expr.location()) == memo.value);
      }
    }
  }

  TEST_CASE("the focus fast path visits the same redexes as recomputation") {
    for (const auto& [file, calls] : corpus_calls()) {
      Program p = load_program(file);
      for (const auto& call : calls) {
        Configuration c = initial_configuration(p, Heap{}, call);
        MachineOptions fast{.focus_fast_path = true, .record_trace = true};
        MachineOptions slow{.focus_fast_path = false, .record_trace = true};
        Machine a(p, c, fast), b(p, c, slow);
        while (!a.done()) {
          CHECK(a.focus_path() == decompose(a.configuration().expr)->path);
          CHECK(a.focus_path() == b.focus_path());
          CHECK(a.weight() == expression_weight(a.configuration().expr));
          CHECK(a.size() == configuration_size(a.configuration()));
          a.step();
          b.step();
        }
        CHECK(b.done());
        CHECK(a.trace() == b.trace());
        CHECK(a.configuration().expr == b.configuration().expr);
      }
    }
  }

  TEST_CASE("trace csv") {
    Program p = id_program();
    Configuration c = initial_configuration(p, Heap{}, parse(p, "id(suc(zero))"));
    RunResult r = run(p, c.heap, c.expr, std::nullopt, MachineOptions{.focus_fast_path = true, .record_trace = true});
    std::ostringstream os;
    write_trace_csv(os, r.trace);
    CHECK(os.str() == "step,kind,weight,heap_size,cache_size\n1,apply,1,2,0\n2,store,0,2,1\n");
  }

  TEST_CASE("deep inputs run without recursion") {
    Program add = load_program("add.trs");
    Configuration c = initial_configuration(add, Heap{}, Term::apply(sym("add"), {num(10000), num(1)}));
    RunResult r = run(add, c.heap, c.expr);
    CHECK(r.stats.applies == 10001);
    CHECK(unfold(r.final.heap, r.answer()) == num(10001));
  }
}
