#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "memodag/bigstep.hpp"
#include "memodag/expression.hpp"
#include "memodag/heap.hpp"
#include "memodag/program.hpp"

namespace memodag {

enum class StepKind { Apply, Read, Store, Merge };

const char* to_string(StepKind k);

/// A call on heap references.
struct RefCall {
  Symbol operation;
  std::vector<Location> args;
  friend bool operator==(const RefCall&, const RefCall&) = default;
};

struct RefCallHash {
  std::size_t operator()(const RefCall& c) const;
};

/// Reference-level memo table: calls on locations mapped to result locations.
class RefCache {
 public:
  std::optional<Location> find(const RefCall& call) const;
  bool insert(RefCall call, Location result);
  bool contains_call(Symbol op, std::span<const Location> args) const;
  std::size_t size() const { return entries_.size(); }
  const std::unordered_map<RefCall, Location, RefCallHash>& entries() const { return entries_; }

 private:
  std::unordered_map<RefCall, Location, RefCallHash> entries_;
};

struct Configuration {
  RefCache cache;
  Heap heap;
  Expression expr;
};

/// Empty cache, the given heap, and the call with its value arguments
/// stored on the heap.
Configuration initial_configuration(const Program& p, Heap heap, const Term& call);

/// |cache| + |heap nodes| + expression size (locations count 1).
std::uint64_t configuration_size(const Configuration& c);

struct RunStats {
  std::uint64_t applies = 0;
  std::uint64_t reads = 0;
  std::uint64_t stores = 0;
  std::uint64_t merges = 0;
  std::uint64_t total = 0;
  std::uint64_t delta = 0;
  std::uint64_t initial_weight = 0;
};

struct TraceRow {
  std::uint64_t step;
  StepKind kind;
  std::uint64_t weight;
  std::size_t heap_size;
  std::size_t cache_size;
  friend bool operator==(const TraceRow&, const TraceRow&) = default;
};

/// CSV with header "step,kind,weight,heap_size,cache_size".
void write_trace_csv(std::ostream& os, std::span<const TraceRow> rows);

struct MachineOptions {
  /// Resume redex search from the last rewritten position instead of the
  /// root. Both strategies visit the same redexes in the same order.
  bool focus_fast_path = true;
  bool record_trace = false;
};

/// Small-step machine with a maximally shared heap and a reference cache.
/// Steps: merge (construct on locations), read (cached call), apply
/// (uncached call; rule matched on the heap), store (annotation around a
/// location).
class Machine {
 public:
  Machine(const Program& p, Configuration start, MachineOptions options = {});

  /// Performs one step; nothing once the expression is a single location.
  /// Throws EvalError(Stuck) when no rule matches an uncached call.
  std::optional<StepKind> step();

  bool done() const { return focus_.empty(); }
  const Configuration& configuration() const { return config_; }
  Configuration release() && { return std::move(config_); }
  const RunStats& stats() const { return stats_; }
  const std::vector<TraceRow>& trace() const { return trace_; }

  /// Tracked incrementally; equal to expression_weight / configuration_size.
  std::uint64_t weight() const { return weight_; }
  std::uint64_t size() const { return expr_size_ + config_.heap.size() + config_.cache.size(); }

  /// Current redex position (matches decompose on the configuration).
  std::vector<std::size_t> focus_path() const;

 private:
  void descend_from(Expression* node);
  void refocus_after(StepKind kind);

  const Program& program_;
  Configuration config_;
  MachineOptions options_;
  RunStats stats_;
  std::vector<TraceRow> trace_;
  std::vector<Expression*> focus_;
  std::vector<std::size_t> focus_index_;
  std::uint64_t weight_ = 0;
  std::uint64_t expr_size_ = 0;
};

/// (1 + delta) * 10^7 + weight of the start expression.
std::uint64_t default_step_budget(const Program& p, const Expression& e);

struct RunResult {
  Configuration final;
  RunStats stats;
  std::vector<TraceRow> trace;
  /// Location of the result; valid once the run has terminated.
  Location answer() const { return final.expr.location(); }
};

/// Runs to a terminal configuration. Throws EvalError (Stuck or
/// BudgetExceeded); the budget bounds the total number of steps.
RunResult run(const Program& p, Heap h0, Expression e0, std::optional<std::uint64_t> step_budget = std::nullopt,
              MachineOptions options = {});

/// One step on a copy of the configuration.
std::optional<std::pair<Configuration, StepKind>> step(const Configuration& c, const Program& p);

struct WellFormednessViolation {
  int clause;  // 1: maximal sharing, 2: cache compatibility, 3: dangling location
  std::string witness;
};

std::vector<WellFormednessViolation> check_well_formed(const Configuration& c);

/// Every rule instance applicable at the unique decomposition. A
/// deterministic machine has exactly one at each non-terminal configuration.
std::vector<StepKind> applicable_rules(const Configuration& c, const Program& p);

}  // namespace memodag
