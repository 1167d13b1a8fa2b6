#include "memodag/heap.hpp"

#include <ostream>
#include <string>
#include <unordered_set>

namespace memodag {

std::ostream& operator<<(std::ostream& os, Location l) { return os << '@' << l.index; }

std::size_t LocationsHash::operator()(std::span<const Location> ls) const {
  std::size_t h = ls.size();
  for (auto l : ls) h ^= l.index + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

DanglingLocation::DanglingLocation(Location l)
    : std::out_of_range("dangling location @" + std::to_string(l.index)), location_(l) {}

std::size_t Heap::KeyHash::operator()(const Key& k) const {
  return LocationsHash{}(k.successors) * 31 + k.constructor.hash();
}

Heap Heap::from_nodes(std::vector<Node> nodes) {
  Heap h;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (auto s : nodes[i].successors) {
      if (s.index >= i) throw DanglingLocation(s);
    }
    h.index_.emplace(Key{nodes[i].constructor, nodes[i].successors}, Location{static_cast<std::uint32_t>(i)});
  }
  h.nodes_ = std::move(nodes);
  return h;
}

Location Heap::merge(Symbol constructor, std::span<const Location> args) {
  for (auto a : args) {
    if (!contains(a)) throw DanglingLocation(a);
  }
  Key key{constructor, {args.begin(), args.end()}};
  auto it = index_.find(key);
  if (it != index_.end()) return it->second;
  Location fresh{static_cast<std::uint32_t>(nodes_.size())};
  nodes_.push_back({constructor, key.successors});
  index_.emplace(std::move(key), fresh);
  return fresh;
}

std::optional<Location> Heap::find(Symbol constructor, std::span<const Location> args) const {
  auto it = index_.find(Key{constructor, {args.begin(), args.end()}});
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const Heap::Node& Heap::at(Location l) const {
  if (!contains(l)) throw DanglingLocation(l);
  return nodes_[l.index];
}

std::pair<Heap, Location> merge(const Heap& h, Symbol constructor, std::span<const Location> args) {
  Heap copy = h;
  Location l = copy.merge(constructor, args);
  return {std::move(copy), l};
}

namespace {

// Reachable locations in ascending order. Successors always precede their
// parents, so ascending order is a valid bottom-up order.
std::vector<Location> reachable(const Heap& h, Location root) {
  h.at(root);
  std::vector<bool> seen(root.index + 1, false);
  std::vector<Location> stack{root};
  seen[root.index] = true;
  while (!stack.empty()) {
    Location l = stack.back();
    stack.pop_back();
    for (auto s : h.at(l).successors) {
      if (!seen[s.index]) {
        seen[s.index] = true;
        stack.push_back(s);
      }
    }
  }
  std::vector<Location> out;
  for (std::uint32_t i = 0; i <= root.index; ++i) {
    if (seen[i]) out.push_back(Location{i});
  }
  return out;
}

}  // namespace

Term unfold(const Heap& h, Location l) {
  std::unordered_map<Location, Term> built;
  for (auto loc : reachable(h, l)) {
    const auto& node = h.at(loc);
    std::vector<Term> args;
    args.reserve(node.successors.size());
    for (auto s : node.successors) args.push_back(built.at(s));
    built.emplace(loc, Term::apply(node.constructor, std::move(args)));
  }
  return built.at(l);
}

Location store_value(Heap& h, const Term& value) {
  std::unordered_map<const void*, Location> stored;
  std::vector<std::pair<const Term*, bool>> stack{{&value, false}};
  std::vector<Location> args;
  while (!stack.empty()) {
    auto [t, expanded] = stack.back();
    stack.pop_back();
    if (stored.count(t->identity())) continue;
    if (t->is_variable()) throw std::invalid_argument("store_value: term is not ground: " + to_string(value));
    if (!expanded) {
      stack.emplace_back(t, true);
      for (std::size_t i = t->arity(); i-- > 0;) stack.emplace_back(&t->arg(i), false);
      continue;
    }
    args.clear();
    for (const auto& a : t->args()) args.push_back(stored.at(a.identity()));
    stored.emplace(t->identity(), h.merge(t->symbol(), args));
  }
  return stored.at(value.identity());
}

bool is_maximally_shared(const Heap& h) {
  std::unordered_set<std::string> seen;
  for (const auto& n : h.nodes()) {
    std::string key = n.constructor.name();
    for (auto s : n.successors) key += "," + std::to_string(s.index);
    if (!seen.insert(std::move(key)).second) return false;
  }
  return true;
}

std::size_t reachable_count(const Heap& h, Location l) { return reachable(h, l).size(); }

boost::multiprecision::cpp_int unfolded_size(const Heap& h, Location l) {
  std::unordered_map<Location, boost::multiprecision::cpp_int> size;
  for (auto loc : reachable(h, l)) {
    boost::multiprecision::cpp_int s = 1;
    for (auto c : h.at(loc).successors) s += size.at(c);
    size.emplace(loc, std::move(s));
  }
  return size.at(l);
}

std::optional<GraphMatch> match_graph(const TermGraph& tree, const Heap& h, Location root) {
  GraphMatch m;
  m.morphism.assign(tree.nodes.size(), Location{});
  m.morphism[tree.root] = root;
  // Pre-order numbering: every node is assigned before its successors are visited.
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    const auto& pn = tree.nodes[i];
    Location image = m.morphism[i];
    if (pn.is_variable) {
      m.bindings.emplace_back(pn.label, image);
      continue;
    }
    const auto& hn = h.at(image);
    if (hn.constructor != pn.label || hn.successors.size() != pn.successors.size()) return std::nullopt;
    for (std::size_t k = 0; k < pn.successors.size(); ++k) m.morphism[pn.successors[k]] = hn.successors[k];
  }
  return m;
}

std::optional<GraphMatch> match_graph(const Term& pattern, const Heap& h, Location root) {
  return match_graph(canonical_tree(pattern), h, root);
}

void write_dot(std::ostream& os, const Heap& h, std::optional<Location> root) {
  std::vector<Location> locs;
  if (root) {
    locs = reachable(h, *root);
  } else {
    for (std::uint32_t i = 0; i < h.size(); ++i) locs.push_back(Location{i});
  }
  os << "digraph heap {\n  node [shape=box, fontname=\"monospace\"];\n";
  for (auto l : locs) {
    os << "  l" << l.index << " [label=\"ℓ" << l.index << ": " << h.at(l).constructor << "\"];\n";
  }
  for (auto l : locs) {
    const auto& succ = h.at(l).successors;
    for (std::size_t i = 0; i < succ.size(); ++i) {
      os << "  l" << l.index << " -> l" << succ[i].index << " [label=\"" << i + 1 << "\"];\n";
    }
  }
  os << "}\n";
}

}  // namespace memodag
