#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "memodag/term.hpp"
#include "memodag/term_graph.hpp"

namespace memodag {

enum class SymbolKind { Constructor, Operation };

struct SymbolInfo {
  Symbol name;
  SymbolKind kind;
  std::size_t arity;
};

/// Disjoint constructor and operation signatures, in declaration order.
class Signature {
 public:
  /// Throws std::invalid_argument if the name is already declared.
  void add_constructor(Symbol name, std::size_t arity);
  void add_operation(Symbol name, std::size_t arity);

  std::optional<SymbolInfo> lookup(Symbol name) const;
  bool is_constructor(Symbol name) const;
  bool is_operation(Symbol name) const;
  std::size_t arity(Symbol name) const;

  const std::vector<SymbolInfo>& constructors() const { return constructors_; }
  const std::vector<SymbolInfo>& operations() const { return operations_; }

 private:
  void add(SymbolInfo info);
  std::vector<SymbolInfo> constructors_;
  std::vector<SymbolInfo> operations_;
  std::unordered_map<Symbol, SymbolInfo> index_;
};

struct Rule {
  Term lhs;
  Term rhs;
};

std::string to_string(const Rule& rule);

/// A reason a rule set is not an orthogonal constructor program.
struct Violation {
  enum class Kind { Shape, Arity, Linearity, FreeVariable, Ambiguity };
  Kind kind;
  std::size_t rule;
  std::size_t other_rule = 0;  // second rule of an ambiguity
  std::string message;
};

/// Every shape, linearity, variable and overlap violation, in rule order.
std::vector<Violation> orthogonality_violations(const Signature& sig, const std::vector<Rule>& rules);

/// Whether two linear constructor patterns have a common instance. Patterns
/// are renamed apart implicitly.
bool patterns_overlap(const Term& p, const Term& q);

class ProgramError : public std::runtime_error {
 public:
  explicit ProgramError(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

/// Orthogonal constructor rewrite program. Immutable once built.
class Program {
 public:
  /// Throws ProgramError unless the rules form an orthogonal program.
  Program(Signature signature, std::vector<Rule> rules);

  const Signature& signature() const { return signature_; }
  const std::vector<Rule>& rules() const { return rules_; }

  /// Indices of the rules defining an operation, in program order.
  const std::vector<std::size_t>& rules_for(Symbol op) const;

  /// Canonical trees of the argument patterns of a rule's left-hand side.
  const std::vector<TermGraph>& argument_trees(std::size_t rule) const { return arg_trees_[rule]; }

  /// Maximum right-hand side size over all rules.
  std::uint64_t delta() const { return delta_; }

  /// Whether the term is built from constructors only.
  bool is_value(const Term& t) const;

 private:
  Signature signature_;
  std::vector<Rule> rules_;
  std::unordered_map<Symbol, std::vector<std::size_t>> by_operation_;
  std::vector<std::vector<TermGraph>> arg_trees_;
  std::uint64_t delta_ = 0;
};

/// Maximum right-hand side size; throws std::invalid_argument when the
/// program has no rules.
std::uint64_t program_delta(const Program& p);

/// Renders in the text format accepted by parse_program.
std::string pretty_print(const Program& p);

}  // namespace memodag
