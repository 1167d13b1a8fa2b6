#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "memodag/heap.hpp"
#include "memodag/program.hpp"

namespace memodag {

/// Expression of the shared machine: a heap reference, an operation call,
/// a constructor application, or an annotation f<l1..lk>{e} recording that
/// e descends from the call f(l1..lk).
class Expression {
 public:
  enum class Kind : std::uint8_t { Location, Annotation, Call, Construct };

  static Expression location(Location l);
  static Expression call(Symbol op, std::vector<Expression> args);
  static Expression construct(Symbol c, std::vector<Expression> args);
  static Expression annotation(Symbol op, std::vector<Location> call_args, Expression body);

  Kind kind() const { return kind_; }
  bool is_location() const { return kind_ == Kind::Location; }
  Location location() const { return location_; }
  Symbol symbol() const { return symbol_; }
  /// Arguments of a call or construct; the single body of an annotation.
  std::span<const Expression> args() const { return children_; }
  const Expression& body() const { return children_.front(); }
  /// The recorded call arguments of an annotation.
  std::span<const Location> annotation_args() const { return refs_; }

  std::vector<Expression>& mutable_children() { return children_; }

  friend bool operator==(const Expression&, const Expression&) = default;

 private:
  Kind kind_ = Kind::Location;
  Symbol symbol_;
  Location location_;
  std::vector<Location> refs_;
  std::vector<Expression> children_;
};

/// Locations print as @N, annotations as f<@0,@1>{e}.
std::string to_string(const Expression& e);

/// Node count where every location counts 1.
std::uint64_t expression_size(const Expression& e);

/// Node count where locations count 0.
std::uint64_t expression_weight(const Expression& e);

/// Replaces locations by their unfoldings and drops annotations.
Term unfold_expression(const Heap& h, const Expression& e);

/// All locations mentioned, including annotation arguments.
std::vector<Location> locations_in(const Expression& e);

/// Converts a ground term: maximal value subterms are stored on the heap
/// and become locations; operation calls and other constructors stay
/// structural.
Expression to_expression(const Program& p, Heap& h, const Term& t);

/// Position of the hole: child indices from the root (an annotation's body
/// is child 0).
struct Decomposition {
  std::vector<std::size_t> path;
  friend bool operator==(const Decomposition&, const Decomposition&) = default;
};

/// The unique split e = E[r] into an evaluation context and a redex (call
/// or construct on locations, or an annotation around a location). None iff
/// e is a location.
std::optional<Decomposition> decompose(const Expression& e);

/// Brute-force enumeration of every decomposition admitted by the context
/// grammar; used to cross-check decompose.
std::vector<Decomposition> all_decompositions(const Expression& e);

const Expression& subexpression(const Expression& e, std::span<const std::size_t> path);

/// Prints the context with the hole as "□".
std::string render_context(const Expression& e, std::span<const std::size_t> path);

}  // namespace memodag
