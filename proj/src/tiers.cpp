#include "memodag/tiers.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace memodag {

std::string to_string(const TierSignature& s) {
  std::ostringstream os;
  for (std::size_t i = 0; i < s.inputs.size(); ++i) os << (i ? " x " : "") << s.inputs[i];
  os << (s.inputs.empty() ? "-> " : " -> ") << s.output;
  return os.str();
}

std::string to_string(const TierSignature& s, const std::vector<std::string>& input_algebras,
                      const std::string& output_algebra) {
  std::ostringstream os;
  for (std::size_t i = 0; i < s.inputs.size(); ++i) {
    os << (i ? " x " : "") << (i < input_algebras.size() ? input_algebras[i] : std::string("A")) << "@"
       << s.inputs[i];
  }
  os << (s.inputs.empty() ? "-> " : " -> ") << output_algebra << "@" << s.output;
  return os.str();
}

const char* to_string(TierRule r) {
  switch (r) {
    case TierRule::Constructor:
      return "constructor";
    case TierRule::Projection:
      return "projection";
    case TierRule::Composition:
      return "composition";
    case TierRule::Case:
      return "case";
    case TierRule::SimRec:
      return "recursion";
  }
  return "?";
}

unsigned default_tier_bound(const FunctionExpr& f) { return static_cast<unsigned>(count_simrec_nodes(f)) + 1; }

TierSignature collapse_tier_gaps(const TierSignature& s) {
  std::set<unsigned> used(s.inputs.begin(), s.inputs.end());
  used.insert(s.output);
  auto rank = [&](unsigned t) { return static_cast<unsigned>(std::distance(used.begin(), used.find(t))); };
  TierSignature out;
  for (auto t : s.inputs) out.inputs.push_back(rank(t));
  out.output = rank(s.output);
  return out;
}

namespace {

std::string short_name(const FunctionExpr& f) {
  switch (f.kind()) {
    case FunctionExpr::Kind::Constructor:
      return "cons[" + f.constructor_symbol().name() + "]";
    case FunctionExpr::Kind::Projection:
      return "proj " + std::to_string(f.proj_m()) + " " + std::to_string(f.proj_n());
    case FunctionExpr::Kind::Composition:
      return "comp";
    case FunctionExpr::Kind::Case:
      return f.names().empty() ? "case over " + f.algebra()->name : f.names().front();
    case FunctionExpr::Kind::SimRec:
      if (!f.names().empty()) return f.names()[f.select() - 1];
      return "rec over " + f.algebra()->name;
  }
  return "?";
}

// Tier variables per function occurrence, with equalities (constructor and
// projection rules) and strict inequalities (recursion rule). Composition,
// case and recursion premises share the variables of their conclusion.
class TierConstraints {
 public:
  explicit TierConstraints(const FunctionExpr& f) {
    std::vector<int> ins;
    for (std::size_t i = 0; i < f.arity(); ++i) ins.push_back(fresh());
    int out = fresh();
    root_ = generate(f, ins, out, short_name(f));
    classes();
  }

  std::size_t arity() const { return occs_[root_].ins.size(); }

  // A strict cycle makes every signature underivable.
  const std::optional<std::string>& cycle() const { return cycle_; }

  TierCheck solve(const TierSignature& sig, unsigned t_max) const {
    TierCheck result;
    if (cycle_) {
      result.blocking = *cycle_;
      return result;
    }
    const Occ& root = occs_[root_];
    if (sig.inputs.size() != root.ins.size()) {
      result.blocking = "signature has " + std::to_string(sig.inputs.size()) + " inputs but the function takes " +
                        std::to_string(root.ins.size());
      return result;
    }
    const std::size_t nc = class_count_;
    std::vector<std::optional<unsigned>> fixed(nc);
    std::vector<int> fixed_by(nc, -1);
    auto fix = [&](int var, unsigned tier, const std::string& what) -> bool {
      int c = class_of_[var];
      if (fixed[c] && *fixed[c] != tier) {
        std::ostringstream os;
        os << what << " has tier " << tier << " but must equal tier " << *fixed[c] << " of "
           << describe_var(fixed_by[c]) << ": " << equality_path(fixed_by[c], var);
        result.blocking = os.str();
        return false;
      }
      fixed[c] = tier;
      fixed_by[c] = var;
      return true;
    };
    for (std::size_t i = 0; i < root.ins.size(); ++i) {
      if (!fix(root.ins[i], sig.inputs[i], "input " + std::to_string(i + 1))) return result;
    }
    if (!fix(root.out, sig.output, "the output")) return result;

    // Least solution: longest chain of strict constraints below each class.
    std::vector<unsigned> low(nc, 0);
    std::vector<int> via(nc, -1);
    for (int c : topo_low_first_) {
      low[c] = fixed[c].value_or(0);
      for (int e : strict_from_[c]) {
        int lo = class_of_[strict_[e].lo];
        if (low[lo] + 1 > low[c]) {
          low[c] = low[lo] + 1;
          via[c] = e;
        }
      }
      unsigned ub = fixed[c].value_or(t_max);
      if (low[c] > ub) {
        std::ostringstream os;
        os << "a tier of at least " << low[c] << " is required, but "
           << (fixed[c] ? describe_var(fixed_by[c]) + " is fixed to " + std::to_string(ub)
                        : "tiers are bounded by " + std::to_string(ub))
           << ":";
        for (int cur = c; via[cur] >= 0; cur = class_of_[strict_[via[cur]].lo]) {
          os << " " << strict_[via[cur]].origin << ";";
        }
        result.blocking = os.str();
        result.blocking.pop_back();
        return result;
      }
    }
    std::vector<unsigned> value(var_count_);
    for (int v = 0; v < var_count_; ++v) value[v] = low[class_of_[v]];
    result.derivation = build(root_, value);
    return result;
  }

 private:
  struct Occ {
    FunctionExpr f;
    std::vector<int> ins;
    int out;
    std::vector<int> premises;
    TierRule rule;
    std::string path;
  };
  struct Equality {
    int a, b;
    std::string origin;
  };
  struct Strict {
    int hi, lo;
    std::string origin;
  };

  int fresh() {
    var_names_.emplace_back();
    return var_count_++;
  }

  void name_var(int v, std::string name) {
    if (var_names_[v].empty()) var_names_[v] = std::move(name);
  }

  std::string describe_var(int v) const { return var_names_[v].empty() ? "an intermediate tier" : var_names_[v]; }

  int generate(const FunctionExpr& f, const std::vector<int>& ins, int out, const std::string& path) {
    using K = FunctionExpr::Kind;
    int id = static_cast<int>(occs_.size());
    occs_.push_back(Occ{f, ins, out, {}, TierRule::Constructor, path});
    for (std::size_t i = 0; i < ins.size(); ++i) name_var(ins[i], "input " + std::to_string(i + 1) + " of " + path);
    name_var(out, "the output of " + path);
    std::vector<int> premises;
    TierRule rule = TierRule::Constructor;
    switch (f.kind()) {
      case K::Constructor:
        for (int x : ins) equalities_.push_back({x, out, path + " keeps every tier equal"});
        break;
      case K::Projection:
        rule = TierRule::Projection;
        equalities_.push_back({ins[f.proj_n() - 1], out, path + " passes its input through"});
        break;
      case K::Composition: {
        rule = TierRule::Composition;
        std::vector<int> mids;
        for (std::size_t i = 0; i < f.inner().size(); ++i) mids.push_back(fresh());
        premises.push_back(generate(f.outer(), mids, out, path + " / " + short_name(f.outer())));
        for (std::size_t i = 0; i < f.inner().size(); ++i) {
          premises.push_back(generate(f.inner()[i], ins, mids[i],
                                      path + " / argument " + std::to_string(i + 1) + " " + short_name(f.inner()[i])));
        }
        break;
      }
      case K::Case: {
        rule = TierRule::Case;
        for (std::size_t i = 0; i < f.branches().size(); ++i) {
          auto [c, ar] = f.algebra()->constructors[i];
          std::vector<int> bins(ar, ins[0]);
          bins.insert(bins.end(), ins.begin() + 1, ins.end());
          premises.push_back(generate(f.branches()[i], bins, out, path + " / " + c.name() + " branch"));
        }
        break;
      }
      case K::SimRec: {
        rule = TierRule::SimRec;
        strict_.push_back({ins[0], out,
                           "recursion " + path + " needs its recursion tier above its output tier"});
        const std::size_t comps = f.components();
        for (std::size_t i = 0; i < f.grid().size(); ++i) {
          auto [c, ar] = f.algebra()->constructors[i];
          std::vector<int> bins(ar, ins[0]);
          bins.insert(bins.end(), comps * ar, out);
          bins.insert(bins.end(), ins.begin() + 1, ins.end());
          for (std::size_t j = 0; j < comps; ++j) {
            std::string step = path + " / " + c.name() + " step";
            if (comps > 1) step += " " + std::to_string(j + 1);
            premises.push_back(generate(f.grid()[i][j], bins, out, step));
          }
        }
        break;
      }
    }
    occs_[id].premises = std::move(premises);
    occs_[id].rule = rule;
    return id;
  }

  int find(std::vector<int>& parent, int x) const {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }

  void classes() {
    std::vector<int> parent(var_count_);
    std::iota(parent.begin(), parent.end(), 0);
    for (const auto& e : equalities_) parent[find(parent, e.a)] = find(parent, e.b);
    class_of_.assign(var_count_, -1);
    std::map<int, int> ids;
    for (int v = 0; v < var_count_; ++v) {
      int r = find(parent, v);
      auto [it, fresh] = ids.emplace(r, static_cast<int>(ids.size()));
      class_of_[v] = it->second;
    }
    class_count_ = ids.size();
    strict_from_.assign(class_count_, {});
    for (std::size_t e = 0; e < strict_.size(); ++e) {
      strict_from_[class_of_[strict_[e].hi]].push_back(static_cast<int>(e));
    }
    // Topological order with lower classes first; a leftover means a cycle.
    std::vector<int> pending(class_count_, 0);
    std::vector<std::vector<int>> above(class_count_);
    for (std::size_t e = 0; e < strict_.size(); ++e) {
      int hi = class_of_[strict_[e].hi], lo = class_of_[strict_[e].lo];
      ++pending[hi];
      above[lo].push_back(hi);
    }
    std::deque<int> ready;
    for (std::size_t c = 0; c < class_count_; ++c) {
      if (pending[c] == 0) ready.push_back(static_cast<int>(c));
    }
    while (!ready.empty()) {
      int c = ready.front();
      ready.pop_front();
      topo_low_first_.push_back(c);
      for (int hi : above[c]) {
        if (--pending[hi] == 0) ready.push_back(hi);
      }
    }
    if (topo_low_first_.size() != class_count_) cycle_ = explain_cycle(pending);
  }

  std::string explain_cycle(const std::vector<int>& pending) const {
    // Walk strict edges inside the unresolved part until a class repeats.
    int start = -1;
    for (std::size_t c = 0; c < class_count_; ++c) {
      if (pending[c] > 0) {
        start = static_cast<int>(c);
        break;
      }
    }
    std::vector<int> edges;
    std::map<int, std::size_t> seen;
    int cur = start;
    while (!seen.count(cur)) {
      seen[cur] = edges.size();
      int next_edge = -1;
      for (int e : strict_from_[cur]) {
        if (pending[class_of_[strict_[e].lo]] > 0) {
          next_edge = e;
          break;
        }
      }
      edges.push_back(next_edge);
      cur = class_of_[strict_[next_edge].lo];
    }
    std::ostringstream os;
    os << "no tiering exists:";
    for (std::size_t k = seen[cur]; k < edges.size(); ++k) {
      const Strict& s = strict_[edges[k]];
      os << " " << s.origin << ", but " << describe_var(s.lo) << " is forced to equal " << describe_var(s.hi);
      if (class_of_[s.lo] == class_of_[s.hi]) {
        os << " (" << equality_path(s.hi, s.lo) << ")";
      } else {
        os << " from above via further recursions";
      }
      os << ";";
    }
    std::string out = os.str();
    out.pop_back();
    return out;
  }

  // Constraint origins linking two variables of the same class.
  std::string equality_path(int from, int to) const {
    if (from == to) return "same tier variable";
    std::vector<std::vector<std::pair<int, int>>> adj(var_count_);
    for (std::size_t e = 0; e < equalities_.size(); ++e) {
      adj[equalities_[e].a].push_back({equalities_[e].b, static_cast<int>(e)});
      adj[equalities_[e].b].push_back({equalities_[e].a, static_cast<int>(e)});
    }
    std::vector<int> prev_edge(var_count_, -2), prev_var(var_count_, -1);
    std::deque<int> q{from};
    prev_edge[from] = -1;
    while (!q.empty()) {
      int v = q.front();
      q.pop_front();
      if (v == to) break;
      for (auto [w, e] : adj[v]) {
        if (prev_edge[w] != -2) continue;
        prev_edge[w] = e;
        prev_var[w] = v;
        q.push_back(w);
      }
    }
    if (prev_edge[to] == -2) return "tiers are shared by the recursion and composition rules";
    std::vector<std::string> steps;
    for (int v = to; v != from; v = prev_var[v]) steps.push_back(equalities_[prev_edge[v]].origin);
    std::reverse(steps.begin(), steps.end());
    std::string out;
    for (std::size_t i = 0; i < steps.size(); ++i) out += (i ? ", " : "") + steps[i];
    return out;
  }

  TierDerivation build(int id, const std::vector<unsigned>& value) const {
    const Occ& o = occs_[id];
    TierDerivation d{o.f, {}, o.rule, {}};
    for (int v : o.ins) d.signature.inputs.push_back(value[v]);
    d.signature.output = value[o.out];
    for (int p : o.premises) d.premises.push_back(build(p, value));
    return d;
  }

  std::vector<Occ> occs_;
  int root_ = 0;
  int var_count_ = 0;
  std::vector<std::string> var_names_;
  std::vector<Equality> equalities_;
  std::vector<Strict> strict_;
  std::vector<int> class_of_;
  std::size_t class_count_ = 0;
  std::vector<std::vector<int>> strict_from_;
  std::vector<int> topo_low_first_;
  std::optional<std::string> cycle_;
};

}  // namespace

TierCheck check_tiers(const FunctionExpr& f, const TierSignature& sig, std::optional<unsigned> t_max) {
  unsigned bound = t_max.value_or(default_tier_bound(f));
  if (!t_max) {
    for (auto t : sig.inputs) bound = std::max(bound, t);
    bound = std::max(bound, sig.output);
  }
  return TierConstraints(f).solve(sig, bound);
}

std::vector<TierSignature> infer_tiers(const FunctionExpr& f, unsigned t_max) {
  TierConstraints system(f);
  std::vector<TierSignature> out;
  if (system.cycle()) return out;
  const std::size_t k = system.arity();
  std::vector<unsigned> digits(k + 1, 0);
  for (;;) {
    TierSignature s{{digits.begin(), digits.begin() + static_cast<std::ptrdiff_t>(k)}, digits[k]};
    if (system.solve(s, t_max)) out.push_back(s);
    std::size_t pos = k + 1;
    while (pos > 0) {
      --pos;
      if (digits[pos] < t_max) {
        ++digits[pos];
        break;
      }
      digits[pos] = 0;
      if (pos == 0) return out;
    }
  }
}

std::optional<std::string> untierable_reason(const FunctionExpr& f) { return TierConstraints(f).cycle(); }

std::vector<std::string> validate_derivation(const TierDerivation& d) {
  std::vector<std::string> errors;
  std::vector<const TierDerivation*> stack{&d};
  while (!stack.empty()) {
    const TierDerivation& n = *stack.back();
    stack.pop_back();
    const FunctionExpr& f = n.function;
    const TierSignature& s = n.signature;
    auto fail = [&](const std::string& why) { errors.push_back(to_string(f) + " : " + to_string(s) + ": " + why); };
    if (s.inputs.size() != f.arity()) {
      fail("signature arity differs from the function");
      continue;
    }
    auto premise_count = [&](std::size_t want) {
      if (n.premises.size() == want) return true;
      fail("expected " + std::to_string(want) + " premises");
      return false;
    };
    auto check_premise = [&](const TierDerivation& p, const FunctionExpr& g, const TierSignature& want) {
      if (!(p.function == g)) fail("premise function differs from the sub-function " + to_string(g));
      if (p.signature != want) fail("premise " + to_string(g) + " has " + to_string(p.signature) + ", needs " + to_string(want));
    };
    using K = FunctionExpr::Kind;
    switch (f.kind()) {
      case K::Constructor:
        if (n.rule != TierRule::Constructor) fail("wrong rule");
        for (auto t : s.inputs) {
          if (t != s.output) fail("constructor tiers must be equal");
        }
        premise_count(0);
        break;
      case K::Projection:
        if (n.rule != TierRule::Projection) fail("wrong rule");
        if (s.inputs[f.proj_n() - 1] != s.output) fail("projection output must equal the selected input tier");
        premise_count(0);
        break;
      case K::Composition: {
        if (n.rule != TierRule::Composition) fail("wrong rule");
        if (!premise_count(1 + f.inner().size())) break;
        const TierSignature& outer = n.premises[0].signature;
        if (outer.inputs.size() != f.inner().size()) {
          fail("outer premise has the wrong arity");
          break;
        }
        check_premise(n.premises[0], f.outer(), TierSignature{outer.inputs, s.output});
        for (std::size_t i = 0; i < f.inner().size(); ++i) {
          check_premise(n.premises[1 + i], f.inner()[i], TierSignature{s.inputs, outer.inputs[i]});
        }
        break;
      }
      case K::Case: {
        if (n.rule != TierRule::Case) fail("wrong rule");
        if (!premise_count(f.branches().size())) break;
        for (std::size_t i = 0; i < f.branches().size(); ++i) {
          std::vector<unsigned> ins(f.algebra()->constructors[i].second, s.inputs[0]);
          ins.insert(ins.end(), s.inputs.begin() + 1, s.inputs.end());
          check_premise(n.premises[i], f.branches()[i], TierSignature{ins, s.output});
        }
        break;
      }
      case K::SimRec: {
        if (n.rule != TierRule::SimRec) fail("wrong rule");
        if (!(s.inputs[0] > s.output)) fail("recursion tier must exceed the output tier");
        const std::size_t comps = f.components();
        if (!premise_count(f.grid().size() * comps)) break;
        for (std::size_t i = 0; i < f.grid().size(); ++i) {
          std::size_t ar = f.algebra()->constructors[i].second;
          std::vector<unsigned> ins(ar, s.inputs[0]);
          ins.insert(ins.end(), comps * ar, s.output);
          ins.insert(ins.end(), s.inputs.begin() + 1, s.inputs.end());
          for (std::size_t j = 0; j < comps; ++j) {
            check_premise(n.premises[i * comps + j], f.grid()[i][j], TierSignature{ins, s.output});
          }
        }
        break;
      }
    }
    for (const auto& p : n.premises) stack.push_back(&p);
  }
  return errors;
}

}  // namespace memodag
