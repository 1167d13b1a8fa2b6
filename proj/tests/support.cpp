#include "support.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#ifndef MEMODAG_CORPUS_DIR
#error "MEMODAG_CORPUS_DIR must be defined"
#endif

namespace memodag::testing {

std::string corpus_path(const std::string& file) { return std::string(MEMODAG_CORPUS_DIR) + "/" + file; }

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Program load_program(const std::string& file) { return parse_program(read_text(corpus_path(file))); }
GrsrFile load_grsr(const std::string& file) { return parse_grsr(read_text(corpus_path(file))); }

Symbol sym(const char* name) { return Symbol::intern(name); }

Term num(std::size_t n) { return iterate(sym("suc"), n, Term::apply(sym("zero"))); }

Term parse(const Program& p, const std::string& text) { return parse_term(text, p.signature()); }

ConstructorSet constructors_of(const Signature& sig) {
  ConstructorSet out;
  for (const auto& c : sig.constructors()) out.emplace_back(c.name, c.arity);
  return out;
}

ConstructorSet constructors_of(const Algebra& a) { return a.constructors; }

namespace {

std::vector<std::uint32_t> merge_sets(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
  std::vector<std::uint32_t> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

// Calls emit(args) for every tuple of `k` indices into [0, n).
template <class F>
void for_each_tuple(std::size_t n, std::size_t k, F&& emit) {
  std::vector<std::size_t> idx(k, 0);
  if (k == 0) {
    emit(idx);
    return;
  }
  if (n == 0) return;
  for (;;) {
    emit(idx);
    std::size_t pos = k;
    while (pos > 0) {
      --pos;
      if (++idx[pos] < n) break;
      idx[pos] = 0;
      if (pos == 0) return;
    }
  }
}

}  // namespace

std::vector<Term> values_up_to(const ConstructorSet& cs, std::size_t bound, std::size_t cap, bool* complete) {
  std::vector<Term> values;
  std::vector<std::vector<std::uint32_t>> subterms;
  if (complete) *complete = true;
  for (std::size_t b = 1; b <= bound; ++b) {
    const std::size_t existing = values.size();
    for (auto [c, k] : cs) {
      bool stop = false;
      for_each_tuple(existing, k, [&](const std::vector<std::size_t>& idx) {
        if (stop) return;
        std::vector<std::uint32_t> set;
        for (auto i : idx) set = merge_sets(set, subterms[i]);
        if (set.size() + 1 != b) return;
        std::vector<Term> args;
        for (auto i : idx) args.push_back(values[i]);
        auto id = static_cast<std::uint32_t>(values.size());
        set.insert(std::upper_bound(set.begin(), set.end(), id), id);
        values.push_back(Term::apply(c, std::move(args)));
        subterms.push_back(std::move(set));
        if (values.size() >= cap) stop = true;
      });
      if (stop) {
        if (complete) *complete = false;
        return values;
      }
    }
  }
  return values;
}

std::vector<Term> values_of_depth(const ConstructorSet& cs, std::size_t depth) {
  std::vector<Term> level;
  for (auto [c, k] : cs) {
    if (k == 0) level.push_back(Term::apply(c));
  }
  for (std::size_t d = 1; d <= depth; ++d) {
    std::vector<Term> next;
    for (auto [c, k] : cs) {
      if (k == 0) {
        next.push_back(Term::apply(c));
        continue;
      }
      for_each_tuple(level.size(), k, [&](const std::vector<std::size_t>& idx) {
        std::vector<Term> args;
        for (auto i : idx) args.push_back(level[i]);
        next.push_back(Term::apply(c, std::move(args)));
      });
    }
    level = std::move(next);
  }
  return level;
}

namespace {

Term rename_fresh(const Term& t, std::size_t& counter) {
  if (t.is_variable()) return Term::variable(Symbol::intern("x" + std::to_string(++counter)));
  std::vector<Term> args;
  for (const auto& a : t.args()) args.push_back(rename_fresh(a, counter));
  return Term::apply(t.symbol(), std::move(args));
}

}  // namespace

std::vector<Term> patterns_of_depth(const ConstructorSet& cs, std::size_t depth) {
  ConstructorSet with_hole = cs;
  std::vector<Term> level{Term::variable(sym("_"))};
  for (auto [c, k] : cs) {
    if (k == 0) level.push_back(Term::apply(c));
  }
  for (std::size_t d = 1; d <= depth; ++d) {
    std::vector<Term> next{Term::variable(sym("_"))};
    for (auto [c, k] : cs) {
      if (k == 0) {
        next.push_back(Term::apply(c));
        continue;
      }
      for_each_tuple(level.size(), k, [&](const std::vector<std::size_t>& idx) {
        std::vector<Term> args;
        for (auto i : idx) args.push_back(level[i]);
        next.push_back(Term::apply(c, std::move(args)));
      });
    }
    level = std::move(next);
  }
  std::vector<Term> out;
  out.reserve(level.size());
  for (const auto& p : level) {
    std::size_t counter = 0;
    out.push_back(rename_fresh(p, counter));
  }
  return out;
}

std::vector<std::vector<Term>> tuples_up_to(const std::vector<std::vector<Term>>& per_position, std::size_t bound) {
  std::vector<std::vector<Term>> out;
  std::vector<Term> cur;
  auto rec = [&](auto&& self, std::size_t pos) -> void {
    if (pos == per_position.size()) {
      out.push_back(cur);
      return;
    }
    for (const auto& v : per_position[pos]) {
      cur.push_back(v);
      if (minimal_shared_size(cur) <= bound) self(self, pos + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

std::vector<Term> random_tuple(std::mt19937_64& rng, const std::vector<ConstructorSet>& sorts, std::size_t nodes) {
  std::vector<std::vector<Term>> pool(sorts.size());
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  for (std::size_t made = 0; made < nodes; ++made) {
    std::size_t s = pick(sorts.size());
    const auto& cs = sorts[s];
    auto [c, k] = cs[pick(cs.size())];
    if (k > 0 && pool[s].empty()) {
      for (auto [c0, k0] : cs) {
        if (k0 == 0) {
          c = c0;
          k = 0;
          break;
        }
      }
    }
    std::vector<Term> args;
    for (std::size_t i = 0; i < k; ++i) {
      // Prefer recent nodes so that values get deep.
      std::size_t n = pool[s].size();
      std::size_t j = pick(5) < 3 ? n - 1 - pick(std::min<std::size_t>(n, 3)) : pick(n);
      args.push_back(pool[s][j]);
    }
    pool[s].push_back(Term::apply(c, std::move(args)));
  }
  std::vector<Term> out;
  for (std::size_t s = 0; s < sorts.size(); ++s) {
    if (pool[s].empty()) {
      for (auto [c0, k0] : sorts[s]) {
        if (k0 == 0) {
          pool[s].push_back(Term::apply(c0));
          break;
        }
      }
    }
    std::size_t n = pool[s].size();
    out.push_back(pool[s][n - 1 - pick(std::min<std::size_t>(n, 2))]);
  }
  return out;
}

namespace {

struct Generator {
  std::mt19937_64 rng;
  ConstructorSet cons;
  std::vector<std::pair<std::string, std::size_t>> ops;

  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }
  bool coin(double p) { return std::uniform_real_distribution<double>(0, 1)(rng) < p; }

  // Right-hand side of operation `self` given the recursion variables (from
  // the first argument) and the other variables.
  std::string rhs(std::size_t self, const std::vector<std::string>& rec_vars, const std::vector<std::string>& vars,
                  std::size_t depth) {
    std::vector<std::string> all = rec_vars;
    all.insert(all.end(), vars.begin(), vars.end());
    int choice = depth == 0 ? 0 : static_cast<int>(pick(4));
    if (choice == 0) {
      if (!all.empty() && coin(0.7)) return all[pick(all.size())];
      std::vector<std::pair<Symbol, std::size_t>> nullary;
      for (auto c : cons) {
        if (c.second == 0) nullary.push_back(c);
      }
      return nullary[pick(nullary.size())].first.name();
    }
    if (choice == 1 || (choice == 2 && self == 0) || (choice == 3 && rec_vars.empty())) {
      auto [c, k] = cons[pick(cons.size())];
      std::string s = c.name();
      if (k == 0) return s;
      s += "(";
      for (std::size_t i = 0; i < k; ++i) s += (i ? ", " : "") + rhs(self, rec_vars, vars, depth - 1);
      return s + ")";
    }
    if (choice == 2) {
      auto [name, k] = ops[pick(self)];
      std::string s = name + "(";
      for (std::size_t i = 0; i < k; ++i) s += (i ? ", " : "") + rhs(self, rec_vars, vars, depth - 1);
      return s + ")";
    }
    auto [name, k] = ops[self];
    std::string s = name + "(" + rec_vars[pick(rec_vars.size())];
    for (std::size_t i = 1; i < k; ++i) s += ", " + rhs(self, rec_vars, vars, depth - 1);
    return s + ")";
  }
};

}  // namespace

RandomProgram random_program(std::uint64_t seed) {
  static const std::vector<ConstructorSet> constructor_sets = {
      {{sym("a"), 0}, {sym("s"), 1}},
      {{sym("a"), 0}, {sym("p"), 2}},
      {{sym("a"), 0}, {sym("s"), 1}, {sym("p"), 2}},
      {{sym("a"), 0}, {sym("b"), 0}, {sym("s"), 1}},
      {{sym("a"), 0}, {sym("b"), 0}, {sym("p"), 2}},
      {{sym("a"), 0}, {sym("s"), 1}, {sym("t"), 1}},
  };
  Generator g{std::mt19937_64(seed), {}, {}};
  g.cons = constructor_sets[g.pick(constructor_sets.size())];
  const std::size_t nops = 1 + g.pick(3);
  for (std::size_t i = 0; i < nops; ++i) g.ops.emplace_back("f" + std::to_string(i), 1 + g.pick(2));

  std::ostringstream text;
  text << "constructors: ";
  for (std::size_t i = 0; i < g.cons.size(); ++i) text << (i ? ", " : "") << g.cons[i].first << "/" << g.cons[i].second;
  text << " ;\noperations: ";
  for (std::size_t i = 0; i < nops; ++i) text << (i ? ", " : "") << g.ops[i].first << "/" << g.ops[i].second;
  text << " ;\nrules:\n";
  for (std::size_t i = 0; i < nops; ++i) {
    auto [name, arity] = g.ops[i];
    std::vector<std::string> others;
    for (std::size_t k = 1; k < arity; ++k) others.push_back("y" + std::to_string(k));
    std::string rest;
    for (const auto& y : others) rest += ", " + y;
    for (auto [c, k] : g.cons) {
      const bool split = k > 0 && g.coin(0.3);
      if (!split) {
        std::vector<std::string> xs;
        for (std::size_t l = 1; l <= k; ++l) xs.push_back("x" + std::to_string(l));
        std::string pat = c.name();
        if (k) {
          pat += "(";
          for (std::size_t l = 0; l < k; ++l) pat += (l ? ", " : "") + xs[l];
          pat += ")";
        }
        text << "  " << name << "(" << pat << rest << ") -> " << g.rhs(i, xs, others, 3) << " ;\n";
        continue;
      }
      for (auto [d, kd] : g.cons) {
        std::vector<std::string> xs;
        std::string inner = d.name();
        if (kd) {
          inner += "(";
          for (std::size_t l = 1; l <= kd; ++l) {
            xs.push_back("z" + std::to_string(l));
            inner += (l > 1 ? ", " : "") + xs.back();
          }
          inner += ")";
        }
        std::string pat = c.name() + "(" + inner;
        for (std::size_t l = 2; l <= k; ++l) {
          xs.push_back("x" + std::to_string(l));
          pat += ", " + xs.back();
        }
        pat += ")";
        text << "  " << name << "(" << pat << rest << ") -> " << g.rhs(i, xs, others, 3) << " ;\n";
      }
    }
  }
  std::string src = text.str();
  Program p = parse_program(src);
  Symbol entry = Symbol::intern(g.ops.back().first);
  return RandomProgram{std::move(p), entry, g.ops.back().second, std::move(src)};
}

TracedRun traced_run(const Program& p, const Term& call) {
  TracedRun out;
  out.configs.push_back(initial_configuration(p, Heap{}, call));
  Machine m(p, out.configs.back(), MachineOptions{.focus_fast_path = true, .record_trace = false});
  while (auto k = m.step()) {
    out.kinds.push_back(*k);
    out.configs.push_back(m.configuration());
  }
  out.stats = m.stats();
  return out;
}

std::uint64_t unfolded_term_size(const Term& t) {
  std::unordered_map<const void*, std::uint64_t> memo;
  auto rec = [&](auto&& self, const Term& u) -> std::uint64_t {
    if (auto it = memo.find(u.identity()); it != memo.end()) return it->second;
    std::uint64_t n = 1;
    for (const auto& a : u.args()) n += self(self, a);
    memo.emplace(u.identity(), n);
    return n;
  };
  return rec(rec, t);
}

}  // namespace memodag::testing
