#include "memodag/term.hpp"

#include <algorithm>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>
#include <utility>

namespace memodag {

namespace {

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
  return a > kSaturated - b ? kSaturated : a + b;
}

std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace

struct Term::Node {
  Symbol symbol;
  bool variable = false;
  std::vector<Term> args;
  std::size_t hash = 0;
  std::uint64_t size = 1;

  ~Node() {
    // Unlink uniquely owned descendants iteratively.
    std::vector<Term> pending;
    for (auto& a : args) {
      if (a.node_ && a.node_.use_count() == 1) pending.push_back(std::move(a));
    }
    while (!pending.empty()) {
      Term t = std::move(pending.back());
      pending.pop_back();
      for (auto& a : t.node_->args) {
        if (a.node_ && a.node_.use_count() == 1) pending.push_back(std::move(a));
      }
    }
  }
};

Term Term::variable(Symbol name) {
  auto node = std::make_shared<Node>();
  node->symbol = name;
  node->variable = true;
  node->hash = mix(0x5bd1e995, name.hash());
  return Term(std::move(node));
}

Term Term::apply(Symbol head, std::vector<Term> args) {
  auto node = std::make_shared<Node>();
  node->symbol = head;
  std::size_t h = mix(0x27d4eb2f, head.hash());
  std::uint64_t size = 1;
  for (const auto& a : args) {
    h = mix(h, a.hash());
    size = saturating_add(size, a.size());
  }
  node->hash = mix(h, args.size());
  node->size = size;
  node->args = std::move(args);
  return Term(std::move(node));
}

bool Term::is_variable() const { return node_->variable; }
Symbol Term::symbol() const { return node_->symbol; }
std::span<const Term> Term::args() const { return node_->args; }
std::size_t Term::hash() const { return node_ ? node_->hash : 0; }
std::uint64_t Term::size() const { return node_ ? node_->size : 0; }

bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  if (!a.node_ || !b.node_) return false;
  using Pair = std::pair<const Term::Node*, const Term::Node*>;
  struct PairHash {
    std::size_t operator()(const Pair& p) const {
      return mix(std::hash<const void*>{}(p.first), std::hash<const void*>{}(p.second));
    }
  };
  // Pairs already known equal; only consulted once the walk gets long, so that
  // comparing physically distinct copies of shared DAGs stays polynomial.
  std::unordered_set<Pair, PairHash> seen;
  std::vector<Pair> stack{{a.node_.get(), b.node_.get()}};
  std::size_t visited = 0;
  while (!stack.empty()) {
    auto [x, y] = stack.back();
    stack.pop_back();
    if (x == y) continue;
    if (x->hash != y->hash || x->size != y->size || x->symbol != y->symbol ||
        x->variable != y->variable || x->args.size() != y->args.size()) {
      return false;
    }
    if (++visited > 64 && !seen.insert({x, y}).second) continue;
    for (std::size_t i = x->args.size(); i-- > 0;) {
      stack.emplace_back(x->args[i].node_.get(), y->args[i].node_.get());
    }
  }
  return true;
}

namespace {

void print(std::ostream& os, const Term& t, const PrintOptions& opt, std::size_t depth) {
  if (opt.depth_cap != 0 && depth >= opt.depth_cap && t.arity() > 0) {
    os << "...";
    return;
  }
  if (opt.compress_chains && t.arity() == 1 && !t.is_variable()) {
    std::size_t k = 1;
    const Term* inner = &t.arg(0);
    while (!inner->is_variable() && inner->arity() == 1 && inner->symbol() == t.symbol()) {
      ++k;
      inner = &inner->arg(0);
    }
    if (k >= 3) {
      os << t.symbol() << '^' << k << '(';
      print(os, *inner, opt, depth + k);
      os << ')';
      return;
    }
  }
  os << t.symbol();
  if (t.is_variable() || t.arity() == 0) return;
  os << '(';
  for (std::size_t i = 0; i < t.arity(); ++i) {
    if (i) os << ", ";
    print(os, t.arg(i), opt, depth + 1);
  }
  os << ')';
}

}  // namespace

std::string to_string(const Term& t, const PrintOptions& options) {
  std::ostringstream os;
  print(os, t, options, 0);
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const Term& t) {
  print(os, t, {}, 0);
  return os;
}

std::uint64_t term_size(const Term& t) { return t.size(); }

std::uint64_t minimal_shared_size(std::span<const Term> terms) {
  std::unordered_set<Term, TermHash> subterms;
  std::unordered_set<const void*> visited;
  std::vector<Term> stack(terms.begin(), terms.end());
  while (!stack.empty()) {
    Term t = std::move(stack.back());
    stack.pop_back();
    if (!visited.insert(t.identity()).second) continue;
    for (const auto& a : t.args()) stack.push_back(a);
    subterms.insert(std::move(t));
  }
  return subterms.size();
}

std::size_t term_depth(const Term& t) {
  std::unordered_map<const void*, std::size_t> depth;
  std::vector<std::pair<Term, bool>> stack{{t, false}};
  while (!stack.empty()) {
    auto [u, expanded] = stack.back();
    stack.pop_back();
    if (depth.count(u.identity())) continue;
    if (!expanded) {
      stack.emplace_back(u, true);
      for (const auto& a : u.args()) stack.emplace_back(a, false);
      continue;
    }
    std::size_t d = 0;
    for (const auto& a : u.args()) d = std::max(d, depth.at(a.identity()) + 1);
    depth.emplace(u.identity(), d);
  }
  return depth.at(t.identity());
}

std::vector<Symbol> variables(const Term& t) {
  std::vector<Symbol> out;
  std::vector<const Term*> stack{&t};
  while (!stack.empty()) {
    const Term* u = stack.back();
    stack.pop_back();
    if (u->is_variable()) {
      if (std::find(out.begin(), out.end(), u->symbol()) == out.end()) out.push_back(u->symbol());
      continue;
    }
    for (std::size_t i = u->arity(); i-- > 0;) stack.push_back(&u->arg(i));
  }
  return out;
}

bool is_ground(const Term& t) {
  std::unordered_set<const void*> visited;
  std::vector<const Term*> stack{&t};
  while (!stack.empty()) {
    const Term* u = stack.back();
    stack.pop_back();
    if (u->is_variable()) return false;
    if (!visited.insert(u->identity()).second) continue;
    for (const auto& a : u->args()) stack.push_back(&a);
  }
  return true;
}

bool is_linear(const Term& t) {
  std::set<Symbol> seen;
  std::vector<const Term*> stack{&t};
  while (!stack.empty()) {
    const Term* u = stack.back();
    stack.pop_back();
    if (u->is_variable()) {
      if (!seen.insert(u->symbol()).second) return false;
      continue;
    }
    for (const auto& a : u->args()) stack.push_back(&a);
  }
  return true;
}

Term substitute(const Term& t, const Substitution& sigma) {
  if (t.is_variable()) {
    auto it = sigma.find(t.symbol());
    return it == sigma.end() ? t : it->second;
  }
  if (t.arity() == 0) return t;
  std::vector<Term> args;
  args.reserve(t.arity());
  bool changed = false;
  for (const auto& a : t.args()) {
    args.push_back(substitute(a, sigma));
    changed = changed || args.back().identity() != a.identity();
  }
  return changed ? Term::apply(t.symbol(), std::move(args)) : t;
}

std::optional<Substitution> match_term(const Term& pattern, const Term& subject) {
  Substitution sigma;
  std::vector<std::pair<const Term*, const Term*>> stack{{&pattern, &subject}};
  while (!stack.empty()) {
    auto [p, s] = stack.back();
    stack.pop_back();
    if (p->is_variable()) {
      sigma.emplace(p->symbol(), *s);
      continue;
    }
    if (s->is_variable() || p->symbol() != s->symbol() || p->arity() != s->arity()) {
      return std::nullopt;
    }
    for (std::size_t i = p->arity(); i-- > 0;) stack.emplace_back(&p->arg(i), &s->arg(i));
  }
  return sigma;
}

Term iterate(Symbol f, std::size_t k, Term t) {
  for (std::size_t i = 0; i < k; ++i) t = Term::apply(f, {std::move(t)});
  return t;
}

}  // namespace memodag
