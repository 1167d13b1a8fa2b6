#pragma once

#include <cstddef>
#include <vector>

#include "memodag/term.hpp"

namespace memodag {

/// Acyclic term graph with ordered successors. Nodes are labelled by a
/// symbol or a variable; variable nodes have no successors.
struct TermGraph {
  struct Node {
    Symbol label;
    bool is_variable = false;
    std::vector<std::size_t> successors;
  };
  std::vector<Node> nodes;
  std::size_t root = 0;

  /// Node carrying the given variable label, if any (first in node order).
  std::optional<std::size_t> variable_node(Symbol x) const;
};

/// Tree representation with a fresh node per subterm occurrence. Nodes are
/// numbered in pre-order, so the root is node 0.
TermGraph canonical_tree(const Term& t);

/// Unfolding of a term graph at a node.
Term unfold(const TermGraph& g, std::size_t node);

}  // namespace memodag
