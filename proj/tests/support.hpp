#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "memodag/bigstep.hpp"
#include "memodag/grsr.hpp"
#include "memodag/machine.hpp"
#include "memodag/parse.hpp"
#include "memodag/program.hpp"

namespace memodag::testing {

std::string corpus_path(const std::string& file);
std::string read_text(const std::string& path);
Program load_program(const std::string& file);
GrsrFile load_grsr(const std::string& file);

Symbol sym(const char* name);
Term num(std::size_t n);  // suc^n(zero)
Term parse(const Program& p, const std::string& text);

using ConstructorSet = std::vector<std::pair<Symbol, std::size_t>>;

ConstructorSet constructors_of(const Signature& sig);
ConstructorSet constructors_of(const Algebra& a);

/// Every value with minimal shared size at most `bound`, in increasing
/// size. Stops early (returning false through `complete`) past `cap`.
std::vector<Term> values_up_to(const ConstructorSet& cs, std::size_t bound, std::size_t cap, bool* complete = nullptr);

/// Every value of depth at most `depth` (constants have depth 0).
std::vector<Term> values_of_depth(const ConstructorSet& cs, std::size_t depth);

/// Every linear pattern of depth at most `depth` with fresh variables.
std::vector<Term> patterns_of_depth(const ConstructorSet& cs, std::size_t depth);

/// Argument tuples drawn from per-position value lists whose combined
/// minimal shared size is at most `bound`.
std::vector<std::vector<Term>> tuples_up_to(const std::vector<std::vector<Term>>& per_position, std::size_t bound);

/// Random value tuple built as a DAG of at most `nodes` nodes; the tuple's
/// minimal shared size is therefore at most `nodes`.
std::vector<Term> random_tuple(std::mt19937_64& rng, const std::vector<ConstructorSet>& sorts, std::size_t nodes);

/// Random total orthogonal program over at most three constructors. Every
/// operation splits its first argument on all constructors (sometimes one
/// level deeper) and only recurses on strict subterms or calls earlier
/// operations, so evaluation terminates. The last operation is the entry.
struct RandomProgram {
  Program program;
  Symbol entry;
  std::size_t entry_arity;
  std::string text;
};
RandomProgram random_program(std::uint64_t seed);

/// Full machine run with every step recorded.
struct TracedRun {
  std::vector<Configuration> configs;
  std::vector<StepKind> kinds;
  RunStats stats;
};
TracedRun traced_run(const Program& p, const Term& call);

/// Unfolded size computed on shared structure.
std::uint64_t unfolded_term_size(const Term& t);

}  // namespace memodag::testing
