#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "memodag/term.hpp"
#include "memodag/term_graph.hpp"

namespace memodag {

/// Heap address. Locations are handed out in increasing order, so the
/// "first unused location" is always one past the largest in use.
struct Location {
  std::uint32_t index = 0;
  friend auto operator<=>(Location, Location) = default;
};

std::ostream& operator<<(std::ostream& os, Location l);

struct LocationsHash {
  std::size_t operator()(std::span<const Location> ls) const;
};

class DanglingLocation : public std::out_of_range {
 public:
  explicit DanglingLocation(Location l);
  Location location() const { return location_; }

 private:
  Location location_;
};

/// Multi-rooted acyclic term graph over constructors, addressed by
/// locations. Nodes are only ever appended; an existing location keeps its
/// label and successors for the lifetime of the heap. A reverse index from
/// (constructor, successors) to location makes merge constant time.
class Heap {
 public:
  struct Node {
    Symbol constructor;
    std::vector<Location> successors;
    friend bool operator==(const Node&, const Node&) = default;
  };

  Heap() = default;

  /// Builds a heap from explicit nodes without enforcing maximal sharing.
  /// Successors must refer to earlier nodes.
  static Heap from_nodes(std::vector<Node> nodes);

  /// Returns the location storing c(args), appending a node if none exists.
  Location merge(Symbol constructor, std::span<const Location> args);

  std::optional<Location> find(Symbol constructor, std::span<const Location> args) const;

  const Node& at(Location l) const;
  bool contains(Location l) const { return l.index < nodes_.size(); }
  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }
  const std::vector<Node>& nodes() const { return nodes_; }

 private:
  struct Key {
    Symbol constructor;
    std::vector<Location> successors;
    friend bool operator==(const Key&, const Key&) = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const;
  };

  std::vector<Node> nodes_;
  std::unordered_map<Key, Location, KeyHash> index_;
};

/// Persistent form of Heap::merge: the argument heap is left untouched.
std::pair<Heap, Location> merge(const Heap& h, Symbol constructor, std::span<const Location> args);

/// The value stored at a location. Shared heap nodes become shared term
/// nodes, so the result is built in time linear in the reachable sub-DAG.
Term unfold(const Heap& h, Location l);

/// Stores a value bottom-up by repeated merging and returns its location.
Location store_value(Heap& h, const Term& value);

bool is_maximally_shared(const Heap& h);

/// Number of heap nodes reachable from a location (the answer sub-DAG).
std::size_t reachable_count(const Heap& h, Location l);

/// Size of the unfolding at a location, computed on the DAG.
boost::multiprecision::cpp_int unfolded_size(const Heap& h, Location l);

/// Result of matching a linear pattern against the sub-graph at a location.
struct GraphMatch {
  /// Image of each canonical-tree node of the pattern.
  std::vector<Location> morphism;
  /// Location assigned to each pattern variable.
  std::vector<std::pair<Symbol, Location>> bindings;
};

/// Homomorphism from the canonical tree of a linear pattern into the heap,
/// rooted at the given location, if one exists.
std::optional<GraphMatch> match_graph(const TermGraph& pattern_tree, const Heap& h, Location root);
std::optional<GraphMatch> match_graph(const Term& pattern, const Heap& h, Location root);

/// Graphviz rendering of the heap, or of the sub-DAG reachable from root.
void write_dot(std::ostream& os, const Heap& h, std::optional<Location> root = std::nullopt);

}  // namespace memodag

template <>
struct std::hash<memodag::Location> {
  std::size_t operator()(memodag::Location l) const noexcept { return std::hash<std::uint32_t>{}(l.index); }
};
