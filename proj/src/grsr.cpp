#include "memodag/grsr.hpp"

#include <functional>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace memodag {

namespace {

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h * 0x100000001b3ULL;
}

std::uint64_t algebra_hash(const Algebra& a) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (auto [c, k] : a.constructors) h = mix(mix(h, c.stable_hash()), k);
  return h;
}

bool same_algebra(const std::shared_ptr<const Algebra>& a, const std::shared_ptr<const Algebra>& b) {
  return a == b || (a && b && a->constructors == b->constructors);
}

}  // namespace

void Algebra::validate() const {
  if (constructors.empty()) throw GrsrError("algebra " + name + " has no constructors");
  bool nullary = false;
  std::unordered_set<Symbol> seen;
  for (auto [c, k] : constructors) {
    if (!seen.insert(c).second) throw GrsrError("algebra " + name + " repeats constructor " + c.name());
    nullary = nullary || k == 0;
  }
  if (!nullary) throw GrsrError("algebra " + name + " has no nullary constructor");
}

std::optional<std::size_t> Algebra::index_of(Symbol c) const {
  for (std::size_t i = 0; i < constructors.size(); ++i) {
    if (constructors[i].first == c) return i;
  }
  return std::nullopt;
}

bool Algebra::contains(const Term& value) const {
  std::vector<const Term*> stack{&value};
  std::unordered_set<const void*> seen;
  while (!stack.empty()) {
    const Term* t = stack.back();
    stack.pop_back();
    if (!seen.insert(t->identity()).second) continue;
    if (t->is_variable()) return false;
    auto i = index_of(t->symbol());
    if (!i || constructors[*i].second != t->arity()) return false;
    for (const auto& a : t->args()) stack.push_back(&a);
  }
  return true;
}

FunctionExpr FunctionExpr::constructor(Symbol c, std::size_t arity) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Constructor;
  n->constructor = c;
  n->arity = arity;
  n->hash = mix(mix(1, c.stable_hash()), arity);
  return FunctionExpr(std::move(n));
}

FunctionExpr FunctionExpr::projection(std::size_t m, std::size_t k) {
  if (k < 1 || k > m) {
    throw GrsrError("projection proj " + std::to_string(m) + " " + std::to_string(k) + " is out of range");
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::Projection;
  n->m = m;
  n->n = k;
  n->arity = m;
  n->hash = mix(mix(2, m), k);
  return FunctionExpr(std::move(n));
}

FunctionExpr FunctionExpr::composition(FunctionExpr f, std::vector<FunctionExpr> gs, std::optional<std::size_t> arity) {
  if (f.arity() != gs.size()) {
    throw GrsrError("composition: outer function " + to_string(f) + " takes " + std::to_string(f.arity()) +
                    " arguments but " + std::to_string(gs.size()) + " are supplied");
  }
  std::size_t m = 0;
  if (gs.empty()) {
    if (!arity) throw GrsrError("composition without inner functions needs an explicit arity");
    m = *arity;
  } else {
    m = gs.front().arity();
    for (const auto& g : gs) {
      if (g.arity() != m) throw GrsrError("composition: inner functions disagree on arity in " + to_string(g));
    }
    if (arity && *arity != m) throw GrsrError("composition: declared arity does not match inner functions");
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::Composition;
  n->arity = m;
  n->hash = mix(mix(3, m), f.structural_hash());
  n->children.push_back(std::move(f));
  for (auto& g : gs) {
    n->hash = mix(n->hash, g.structural_hash());
    n->children.push_back(std::move(g));
  }
  return FunctionExpr(std::move(n));
}

FunctionExpr FunctionExpr::case_of(std::shared_ptr<const Algebra> algebra, std::vector<FunctionExpr> branches,
                                   std::string name_hint) {
  if (!algebra) throw GrsrError("case distinction without algebra");
  algebra->validate();
  if (branches.size() != algebra->constructors.size()) {
    throw GrsrError("case over " + algebra->name + " needs one branch per constructor");
  }
  std::optional<std::size_t> q;
  for (std::size_t i = 0; i < branches.size(); ++i) {
    std::size_t ar = algebra->constructors[i].second;
    if (branches[i].arity() < ar) {
      throw GrsrError("case branch for " + algebra->constructors[i].first.name() + " takes too few arguments");
    }
    std::size_t qi = branches[i].arity() - ar;
    if (q && *q != qi) throw GrsrError("case over " + algebra->name + ": branches disagree on extra arguments");
    q = qi;
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::Case;
  n->arity = 1 + *q;
  n->hash = mix(4, algebra_hash(*algebra));
  for (const auto& b : branches) n->hash = mix(n->hash, b.structural_hash());
  n->algebra = std::move(algebra);
  n->children = std::move(branches);
  if (!name_hint.empty()) n->names.push_back(std::move(name_hint));
  return FunctionExpr(std::move(n));
}

FunctionExpr FunctionExpr::simrec(std::shared_ptr<const Algebra> algebra, std::vector<std::vector<FunctionExpr>> grid,
                                  std::size_t select, std::vector<std::string> component_names) {
  if (!algebra) throw GrsrError("recursion without algebra");
  algebra->validate();
  if (grid.size() != algebra->constructors.size()) {
    throw GrsrError("rec over " + algebra->name + " needs one row per constructor");
  }
  const std::size_t comps = grid.front().size();
  if (comps == 0) throw GrsrError("rec over " + algebra->name + " has no components");
  if (select < 1 || select > comps) throw GrsrError("rec over " + algebra->name + ": selector out of range");
  std::optional<std::size_t> q;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i].size() != comps) throw GrsrError("rec over " + algebra->name + ": rows differ in width");
    std::size_t ar = algebra->constructors[i].second;
    for (const auto& f : grid[i]) {
      if (f.arity() < ar * (1 + comps)) {
        throw GrsrError("rec step for " + algebra->constructors[i].first.name() + " takes too few arguments: " +
                        to_string(f));
      }
      std::size_t qi = f.arity() - ar * (1 + comps);
      if (q && *q != qi) throw GrsrError("rec over " + algebra->name + ": steps disagree on extra arguments");
      q = qi;
    }
  }
  if (!component_names.empty() && component_names.size() != comps) {
    throw GrsrError("rec over " + algebra->name + ": wrong number of component names");
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::SimRec;
  n->arity = 1 + *q;
  n->n = select;
  n->hash = mix(5, algebra_hash(*algebra));
  for (const auto& row : grid) {
    for (const auto& f : row) n->hash = mix(n->hash, f.structural_hash());
  }
  n->algebra = std::move(algebra);
  n->grid = std::move(grid);
  n->names = std::move(component_names);
  return FunctionExpr(std::move(n));
}

FunctionExpr FunctionExpr::with_select(std::size_t j) const {
  if (kind() != Kind::SimRec) throw GrsrError("with_select on a non-recursive function");
  if (j < 1 || j > components()) throw GrsrError("selector out of range");
  auto n = std::make_shared<Node>(*node_);
  n->n = j;
  return FunctionExpr(std::move(n));
}

std::uint64_t FunctionExpr::structural_hash() const { return node_->hash; }

bool operator==(const FunctionExpr& a, const FunctionExpr& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  if (x.kind != y.kind || x.hash != y.hash || x.arity != y.arity) return false;
  switch (x.kind) {
    case FunctionExpr::Kind::Constructor:
      return x.constructor == y.constructor;
    case FunctionExpr::Kind::Projection:
      return x.m == y.m && x.n == y.n;
    case FunctionExpr::Kind::Composition:
      return x.children == y.children;
    case FunctionExpr::Kind::Case:
      return same_algebra(x.algebra, y.algebra) && x.children == y.children;
    case FunctionExpr::Kind::SimRec:
      return x.n == y.n && same_algebra(x.algebra, y.algebra) && x.grid == y.grid;
  }
  return false;
}

namespace {

void print(std::ostream& os, const FunctionExpr& f);

void print_operand(std::ostream& os, const FunctionExpr& f) {
  const bool atom = f.kind() == FunctionExpr::Kind::Constructor;
  os << (atom ? " " : " (");
  print(os, f);
  if (!atom) os << ")";
}

void print(std::ostream& os, const FunctionExpr& f) {
  using K = FunctionExpr::Kind;
  switch (f.kind()) {
    case K::Constructor:
      os << "cons[" << f.constructor_symbol() << "]";
      return;
    case K::Projection:
      os << "proj " << f.proj_m() << " " << f.proj_n();
      return;
    case K::Composition:
      os << "comp";
      if (f.inner().empty()) os << "[" << f.arity() << "]";
      print_operand(os, f.outer());
      for (const auto& g : f.inner()) print_operand(os, g);
      return;
    case K::Case: {
      os << "case over " << f.algebra()->name << " {";
      for (std::size_t i = 0; i < f.branches().size(); ++i) {
        os << " " << f.algebra()->constructors[i].first << " => ";
        print(os, f.branches()[i]);
        os << " ;";
      }
      os << " }";
      return;
    }
    case K::SimRec: {
      os << "rec over " << f.algebra()->name << " {";
      for (std::size_t i = 0; i < f.grid().size(); ++i) {
        os << " " << f.algebra()->constructors[i].first << " =>";
        for (std::size_t j = 0; j < f.grid()[i].size(); ++j) {
          os << (j ? ", " : " ");
          print(os, f.grid()[i][j]);
        }
        os << " ;";
      }
      os << " } select " << f.select();
      return;
    }
  }
}

}  // namespace

std::string to_string(const FunctionExpr& f) {
  std::ostringstream os;
  print(os, f);
  return os.str();
}

std::size_t count_simrec_nodes(const FunctionExpr& f) {
  std::unordered_set<std::uint64_t> grids;
  std::vector<FunctionExpr> stack{f};
  while (!stack.empty()) {
    FunctionExpr g = stack.back();
    stack.pop_back();
    switch (g.kind()) {
      case FunctionExpr::Kind::Composition:
        stack.push_back(g.outer());
        for (const auto& h : g.inner()) stack.push_back(h);
        break;
      case FunctionExpr::Kind::Case:
        for (const auto& h : g.branches()) stack.push_back(h);
        break;
      case FunctionExpr::Kind::SimRec:
        if (grids.insert(g.structural_hash()).second) {
          for (const auto& row : g.grid()) {
            for (const auto& h : row) stack.push_back(h);
          }
        }
        break;
      default:
        break;
    }
  }
  return grids.size();
}

namespace {

struct ArgsKey {
  const void* fn;
  std::vector<Term> args;
  friend bool operator==(const ArgsKey&, const ArgsKey&) = default;
};

struct ArgsKeyHash {
  std::size_t operator()(const ArgsKey& k) const {
    std::size_t h = std::hash<const void*>{}(k.fn);
    for (const auto& t : k.args) h = mix(h, t.hash());
    return h;
  }
};

class GrsrEvaluator {
 public:
  Term eval(const FunctionExpr& f, std::span<const Term> args) {
    if (args.size() != f.arity()) {
      throw GrsrError(to_string(f) + " expects " + std::to_string(f.arity()) + " arguments, got " +
                      std::to_string(args.size()));
    }
    using K = FunctionExpr::Kind;
    switch (f.kind()) {
      case K::Constructor:
        return Term::apply(f.constructor_symbol(), {args.begin(), args.end()});
      case K::Projection:
        return args[f.proj_n() - 1];
      case K::Composition: {
        std::vector<Term> mid;
        mid.reserve(f.inner().size());
        for (const auto& g : f.inner()) mid.push_back(eval(g, args));
        return eval(f.outer(), mid);
      }
      case K::Case: {
        std::size_t i = constructor_index(*f.algebra(), args[0]);
        std::vector<Term> inner(args[0].args().begin(), args[0].args().end());
        inner.insert(inner.end(), args.begin() + 1, args.end());
        return eval(f.branches()[i], inner);
      }
      case K::SimRec:
        return components(f, args)[f.select() - 1];
    }
    throw GrsrError("unknown function kind");
  }

 private:
  static std::size_t constructor_index(const Algebra& a, const Term& v) {
    if (v.is_variable()) throw GrsrError("recursion argument is not a value");
    auto i = a.index_of(v.symbol());
    if (!i || a.constructors[*i].second != v.arity()) {
      throw GrsrError("value " + to_string(v) + " is not in algebra " + a.name);
    }
    return *i;
  }

  // All components g_1..g_n at (x, ys), memoized per recursion grid. The
  // subterms of x are visited bottom-up with an explicit stack, so deep
  // recursion arguments do not consume native stack.
  const std::vector<Term>& components(const FunctionExpr& f, std::span<const Term> args) {
    const std::vector<Term> params(args.begin() + 1, args.end());
    auto key_of = [&](const Term& x) {
      ArgsKey key{f.grid().data(), {x}};
      key.args.insert(key.args.end(), params.begin(), params.end());
      return key;
    };
    std::vector<std::pair<Term, bool>> stack{{args[0], false}};
    while (!stack.empty()) {
      auto [x, expanded] = stack.back();
      stack.pop_back();
      ArgsKey key = key_of(x);
      if (memo_.contains(key)) continue;
      std::size_t i = constructor_index(*f.algebra(), x);
      if (!expanded) {
        stack.push_back({x, true});
        for (const auto& xl : x.args()) stack.push_back({xl, false});
        continue;
      }
      const std::size_t comps = f.components();
      std::vector<const std::vector<Term>*> rec;
      rec.reserve(x.arity());
      for (const auto& xl : x.args()) rec.push_back(&memo_.at(key_of(xl)));
      std::vector<Term> step_args(x.args().begin(), x.args().end());
      for (std::size_t j = 0; j < comps; ++j) {
        for (std::size_t l = 0; l < x.arity(); ++l) step_args.push_back((*rec[l])[j]);
      }
      step_args.insert(step_args.end(), params.begin(), params.end());
      std::vector<Term> out;
      out.reserve(comps);
      for (std::size_t j = 0; j < comps; ++j) out.push_back(eval(f.grid()[i][j], step_args));
      memo_.emplace(std::move(key), std::move(out));
    }
    return memo_.at(key_of(args[0]));
  }

  std::unordered_map<ArgsKey, std::vector<Term>, ArgsKeyHash> memo_;
};

}  // namespace

Term eval_grsr(const FunctionExpr& f, std::span<const Term> args) {
  GrsrEvaluator ev;
  return ev.eval(f, args);
}

bool GrsrDefinition::fully_tiered() const {
  if (!output.tier) return false;
  for (const auto& in : inputs) {
    if (!in.tier) return false;
  }
  return true;
}

std::shared_ptr<const Algebra> GrsrFile::algebra(const std::string& name) const {
  for (const auto& a : algebras) {
    if (a->name == name) return a;
  }
  return nullptr;
}

const GrsrDefinition* GrsrFile::definition(const std::string& name) const {
  for (const auto& d : definitions) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

}  // namespace memodag
