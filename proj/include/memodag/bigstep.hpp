#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "memodag/program.hpp"

namespace memodag {

class EvalError : public std::runtime_error {
 public:
  enum class Kind { Stuck, BudgetExceeded, NotGround };
  EvalError(Kind kind, const std::string& message, std::string engine = {});
  Kind kind() const { return kind_; }
  /// Engine that raised the error ("naive", "memo" or "shared"), if known.
  const std::string& engine() const { return engine_; }

 private:
  Kind kind_;
  std::string engine_;
};

/// A fully applied operation call on values.
struct Call {
  Symbol operation;
  std::vector<Term> args;
  friend bool operator==(const Call&, const Call&) = default;
};

struct CallHash {
  std::size_t operator()(const Call& c) const;
};

/// Term-level memo table: calls on values mapped to their results.
class TermCache {
 public:
  std::optional<Term> find(const Call& call) const;
  /// Returns false (and leaves the entry alone) if the call is present.
  bool insert(Call call, Term value);
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::unordered_map<Call, Term, CallHash>& entries() const { return entries_; }

 private:
  std::unordered_map<Call, Term, CallHash> entries_;
};

/// Plain call-by-value evaluation.
///
/// `steps` counts inference nodes of the derivation: one per constructor
/// node evaluated, one per operation node, one per rule firing, and the size
/// of every value re-derived when a bound variable is evaluated. It grows
/// with the unshared size of intermediate values. `rewrites` counts rule
/// firings only.
struct NaiveOutcome {
  Term value;
  std::uint64_t steps = 0;
  std::uint64_t rewrites = 0;
};

/// Throws EvalError: BudgetExceeded once steps exceed the budget, Stuck when
/// no rule matches a call, NotGround for open input.
NaiveOutcome eval_cbv(const Program& p, const Term& t, std::uint64_t budget);

/// Memoizing evaluation with the memoized runtime cost: `cost` counts calls
/// that were not found in the cache (each adds one entry), `reads` those
/// that were. `steps` is counted as in NaiveOutcome and only used for the
/// optional budget.
struct CostedOutcome {
  TermCache cache;
  Term value;
  std::uint64_t cost = 0;
  std::uint64_t reads = 0;
  std::uint64_t steps = 0;
};

CostedOutcome eval_memo(const Program& p, TermCache initial, const Term& t,
                        std::optional<std::uint64_t> budget = std::nullopt);

/// True iff both engines return the same value within the budget. Budget
/// errors propagate with the failing engine named.
bool equivalence_check(const Program& p, const Term& t, std::uint64_t budget);

std::string to_string(const Call& call, const PrintOptions& options = {});

}  // namespace memodag
