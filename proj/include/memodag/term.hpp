#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "memodag/symbol.hpp"

namespace memodag {

/// First-order term: a variable or a symbol applied to arguments.
///
/// Terms are immutable and cheap to copy. Subterms may be physically shared
/// between terms, but a Term always denotes a tree: equality, size and
/// printing are structural. Destruction is iterative, so very deep terms
/// (long successor chains) do not recurse on the machine stack.
class Term {
 public:
  Term() = default;

  static Term variable(Symbol name);
  static Term apply(Symbol head, std::vector<Term> args = {});

  bool valid() const { return node_ != nullptr; }
  bool is_variable() const;
  Symbol symbol() const;
  std::span<const Term> args() const;
  std::size_t arity() const { return args().size(); }
  const Term& arg(std::size_t i) const { return args()[i]; }

  /// Structural hash, computed once at construction.
  std::size_t hash() const;

  /// Number of nodes of the tree (variables count 1). Saturates at
  /// UINT64_MAX for physically shared terms whose unfolding is larger.
  std::uint64_t size() const;

  /// Address of the underlying node; equal identities imply equal terms.
  const void* identity() const { return node_.get(); }

  friend bool operator==(const Term& a, const Term& b);

 private:
  struct Node;
  explicit Term(std::shared_ptr<Node> node) : node_(std::move(node)) {}
  std::shared_ptr<Node> node_;
};

struct TermHash {
  std::size_t operator()(const Term& t) const { return t.hash(); }
};

using Substitution = std::map<Symbol, Term>;

struct PrintOptions {
  /// Subterms below this depth print as "...". Zero disables the cap.
  std::size_t depth_cap = 0;
  /// Print chains of three or more identical unary symbols as f^k(t).
  bool compress_chains = false;
};

std::string to_string(const Term& t, const PrintOptions& options = {});
std::ostream& operator<<(std::ostream& os, const Term& t);

/// Node count of the tree denoted by t (saturating).
std::uint64_t term_size(const Term& t);

/// Cardinality of the union of the subterm sets of the given terms.
std::uint64_t minimal_shared_size(std::span<const Term> terms);

/// Height of the tree: zero for constants and variables.
std::size_t term_depth(const Term& t);

/// Variables in left-to-right order of first occurrence.
std::vector<Symbol> variables(const Term& t);
bool is_ground(const Term& t);
bool is_linear(const Term& t);

Term substitute(const Term& t, const Substitution& sigma);

/// Syntactic matching of a linear pattern against a term: returns sigma with
/// pattern.sigma == subject, or nothing.
std::optional<Substitution> match_term(const Term& pattern, const Term& subject);

/// Unary chain shorthand: f^k(t).
Term iterate(Symbol f, std::size_t k, Term t);

}  // namespace memodag
