#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "memodag/program.hpp"
#include "memodag/term.hpp"

namespace memodag {

class GrsrError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Named free algebra: constructors with arities, in declaration order.
struct Algebra {
  std::string name;
  std::vector<std::pair<Symbol, std::size_t>> constructors;

  /// Throws GrsrError if empty or without a nullary constructor.
  void validate() const;
  std::optional<std::size_t> index_of(Symbol c) const;
  /// Whether the value is built from this algebra's constructors only.
  bool contains(const Term& value) const;
};

/// Combinator term of the recursive function algebra. Immutable and shared.
class FunctionExpr {
 public:
  enum class Kind : std::uint8_t { Constructor, Projection, Composition, Case, SimRec };

  static FunctionExpr constructor(Symbol c, std::size_t arity);
  /// proj(m, n) selects the n-th of m arguments (1-based).
  static FunctionExpr projection(std::size_t m, std::size_t n);
  /// f o (g1..gn); `arity` is required when there are no gs.
  static FunctionExpr composition(FunctionExpr f, std::vector<FunctionExpr> gs,
                                  std::optional<std::size_t> arity = std::nullopt);
  /// One branch per constructor of the algebra, in constructor order.
  static FunctionExpr case_of(std::shared_ptr<const Algebra> algebra, std::vector<FunctionExpr> branches,
                              std::string name_hint = {});
  /// grid[i][j] is the step for constructor i and component j; `select` is
  /// the 1-based component this expression denotes.
  static FunctionExpr simrec(std::shared_ptr<const Algebra> algebra, std::vector<std::vector<FunctionExpr>> grid,
                             std::size_t select, std::vector<std::string> component_names = {});

  Kind kind() const { return node_->kind; }
  std::size_t arity() const { return node_->arity; }

  Symbol constructor_symbol() const { return node_->constructor; }
  std::size_t proj_m() const { return node_->m; }
  std::size_t proj_n() const { return node_->n; }
  const FunctionExpr& outer() const { return node_->children.front(); }
  /// Inner functions of a composition (after the outer one).
  std::span<const FunctionExpr> inner() const { return std::span(node_->children).subspan(1); }
  const std::shared_ptr<const Algebra>& algebra() const { return node_->algebra; }
  std::span<const FunctionExpr> branches() const { return node_->children; }
  const std::vector<std::vector<FunctionExpr>>& grid() const { return node_->grid; }
  std::size_t components() const { return node_->grid.empty() ? 0 : node_->grid.front().size(); }
  std::size_t select() const { return node_->n; }
  const std::vector<std::string>& names() const { return node_->names; }

  /// Same recursion grid with another component selected.
  FunctionExpr with_select(std::size_t j) const;

  /// Structural hash, stable across runs; ignores name hints and the selector.
  std::uint64_t structural_hash() const;
  const void* identity() const { return node_.get(); }

  /// Structural equality (name hints ignored).
  friend bool operator==(const FunctionExpr& a, const FunctionExpr& b);

 private:
  struct Node {
    Kind kind;
    std::size_t arity = 0;
    Symbol constructor;
    std::size_t m = 0, n = 0;
    std::shared_ptr<const Algebra> algebra;
    std::vector<FunctionExpr> children;
    std::vector<std::vector<FunctionExpr>> grid;
    std::vector<std::string> names;
    std::uint64_t hash = 0;
  };
  explicit FunctionExpr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

std::string to_string(const FunctionExpr& f);

/// Number of distinct recursion grids in the expression.
std::size_t count_simrec_nodes(const FunctionExpr& f);

/// Denotational evaluation by structural recursion. Throws GrsrError on an
/// arity mismatch or when a recursion argument lies outside its algebra.
Term eval_grsr(const FunctionExpr& f, std::span<const Term> args);

struct TierAnnotation {
  std::string algebra;
  std::optional<unsigned> tier;
};

/// A named definition of a GRSR file.
struct GrsrDefinition {
  std::string name;
  FunctionExpr body;
  std::vector<TierAnnotation> inputs;
  TierAnnotation output;
  /// Names bound by a simultaneous definition (one per component).
  std::vector<std::string> component_names;
  /// Whether every input and the output carry a tier.
  bool fully_tiered() const;
};

struct GrsrFile {
  std::vector<std::shared_ptr<const Algebra>> algebras;
  std::vector<GrsrDefinition> definitions;
  std::shared_ptr<const Algebra> algebra(const std::string& name) const;
  const GrsrDefinition* definition(const std::string& name) const;
};

/// Parses the definition file format; throws ParseError.
GrsrFile parse_grsr(std::string_view text);

struct CompiledFunction {
  Program program;
  Symbol entry;
};

/// Orients the defining equations into an orthogonal program. Case and
/// recursion nodes become operations (named from hints, otherwise from the
/// structural hash); constructors, projections and compositions are inlined
/// into right-hand sides. An entry that is not itself a case or recursion
/// gets a wrapper rule entry(x1..xk) -> body. Constructors of the given
/// algebras are declared even when unused.
CompiledFunction compile(const FunctionExpr& f, const std::string& entry_name = {},
                         std::span<const std::shared_ptr<const Algebra>> algebras = {});

}  // namespace memodag
