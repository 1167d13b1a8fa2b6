#pragma once

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "memodag/bigstep.hpp"
#include "memodag/heap.hpp"
#include "memodag/machine.hpp"
#include "memodag/program.hpp"

namespace memodag {

enum class Engine { Naive, Memo, Shared };

const char* to_string(Engine e);
std::optional<Engine> parse_engine(std::string_view name);

/// Accepts "1000000", "10^6" and "1e6".
std::uint64_t parse_budget(std::string_view text);

/// Step budget of the naive engine when none is given.
inline constexpr std::uint64_t default_naive_budget = 100'000'000;

struct RunOptions {
  Engine engine = Engine::Shared;
  std::optional<std::uint64_t> budget;
  std::size_t depth_cap = 16;
  bool record_trace = false;
};

struct RunReport {
  Engine engine = Engine::Shared;
  std::string input;
  Term value;
  /// Result unfolded up to the depth cap.
  std::string result;
  std::uint64_t dag_nodes = 0;
  boost::multiprecision::cpp_int unfolded_size;
  /// Memoized cost (absent for the naive engine, which has no cache).
  std::optional<std::uint64_t> m;
  std::uint64_t total_steps = 0;
  std::uint64_t heap_nodes = 0;
  std::uint64_t cache_entries = 0;
  std::uint64_t wall_ns = 0;
  /// Heap holding the result and its location (the final heap for shared).
  Heap heap;
  Location answer;
  std::vector<TraceRow> trace;
};

/// Evaluates a ground call under one engine. Throws EvalError.
RunReport run_engine(const Program& p, const Term& input, const RunOptions& options);

/// Prints "key: value" lines; the wall time comes last.
void print_report(std::ostream& os, const RunReport& r, bool include_wall_time = true);

/// Depth-capped rendering; very large renderings are replaced by a summary.
std::string render_value(const Term& v, std::size_t depth_cap);

struct CrossCheck {
  std::vector<RunReport> reports;
  std::vector<std::string> skipped;
  std::vector<std::string> disagreements;
};

/// Runs all three engines and compares values and the memoized cost of the
/// memo and shared engines. A naive run that exceeds its budget is skipped.
CrossCheck check_all_engines(const Program& p, const Term& input, const RunOptions& options);

/// "sucN" gives suc^n(zero); any other text must contain "{n}", which is
/// replaced by the decimal n.
std::string expand_family(std::string_view family, std::uint64_t n);

struct BenchRow {
  Engine engine;
  std::uint64_t n;
  std::optional<std::uint64_t> m;
  std::uint64_t total_steps = 0;
  std::uint64_t heap_nodes = 0;
  std::uint64_t answer_dag_nodes = 0;
  std::string unfolded_size;
  std::uint64_t wall_ns = 0;
  std::string status;
};

/// Evaluates entry(family(n)) under an engine. Budget and stuck outcomes
/// become the status column instead of exceptions.
BenchRow bench_point(const Program& p, const std::string& entry, std::string_view family, std::uint64_t n,
                     Engine engine, std::optional<std::uint64_t> budget);

void write_bench_header(std::ostream& os);
void write_bench_row(std::ostream& os, const BenchRow& row);

}  // namespace memodag
