#include "memodag/term_graph.hpp"

#include <utility>

namespace memodag {

std::optional<std::size_t> TermGraph::variable_node(Symbol x) const {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].is_variable && nodes[i].label == x) return i;
  }
  return std::nullopt;
}

TermGraph canonical_tree(const Term& t) {
  TermGraph g;
  // (term, parent, argument position); parent == size_t(-1) for the root.
  struct Item {
    const Term* term;
    std::size_t parent;
  };
  std::vector<Item> stack{{&t, static_cast<std::size_t>(-1)}};
  while (!stack.empty()) {
    Item item = stack.back();
    stack.pop_back();
    std::size_t id = g.nodes.size();
    g.nodes.push_back({item.term->symbol(), item.term->is_variable(), {}});
    if (item.parent != static_cast<std::size_t>(-1)) g.nodes[item.parent].successors.push_back(id);
    for (std::size_t i = item.term->arity(); i-- > 0;) stack.push_back({&item.term->arg(i), id});
  }
  return g;
}

Term unfold(const TermGraph& g, std::size_t node) {
  const auto& n = g.nodes.at(node);
  if (n.is_variable) return Term::variable(n.label);
  std::vector<Term> args;
  args.reserve(n.successors.size());
  for (auto s : n.successors) args.push_back(unfold(g, s));
  return Term::apply(n.label, std::move(args));
}

}  // namespace memodag
