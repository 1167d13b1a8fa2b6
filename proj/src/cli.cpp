#include "memodag/cli.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "memodag/parse.hpp"

namespace memodag {

const char* to_string(Engine e) {
  switch (e) {
    case Engine::Naive:
      return "naive";
    case Engine::Memo:
      return "memo";
    case Engine::Shared:
      return "shared";
  }
  return "?";
}

std::optional<Engine> parse_engine(std::string_view name) {
  if (name == "naive") return Engine::Naive;
  if (name == "memo") return Engine::Memo;
  if (name == "shared") return Engine::Shared;
  return std::nullopt;
}

namespace {

std::uint64_t parse_u64(std::string_view s, std::string_view whole) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    throw std::invalid_argument("invalid budget '" + std::string(whole) + "'");
  }
  return v;
}

std::uint64_t power(std::uint64_t base, std::uint64_t exp, std::string_view whole) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < exp; ++i) {
    if (base != 0 && r > std::numeric_limits<std::uint64_t>::max() / base) {
      throw std::invalid_argument("budget '" + std::string(whole) + "' is too large");
    }
    r *= base;
  }
  return r;
}

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b, std::string_view whole) {
  if (b != 0 && a > std::numeric_limits<std::uint64_t>::max() / b) {
    throw std::invalid_argument("budget '" + std::string(whole) + "' is too large");
  }
  return a * b;
}

}  // namespace

std::uint64_t parse_budget(std::string_view text) {
  if (auto caret = text.find('^'); caret != std::string_view::npos) {
    return power(parse_u64(text.substr(0, caret), text), parse_u64(text.substr(caret + 1), text), text);
  }
  if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    return checked_mul(parse_u64(text.substr(0, e), text), power(10, parse_u64(text.substr(e + 1), text), text), text);
  }
  return parse_u64(text, text);
}

std::string render_value(const Term& v, std::size_t depth_cap) {
  // Node count of the capped rendering, computed on the shared structure.
  constexpr std::uint64_t limit = 20'000;
  std::unordered_map<const void*, std::vector<std::uint64_t>> memo;
  auto count = [&](auto&& self, const Term& t, std::size_t depth) -> std::uint64_t {
    if (depth_cap != 0 && depth >= depth_cap) return 1;
    auto& slots = memo[t.identity()];
    if (slots.size() <= depth) slots.resize(depth + 1, 0);
    if (slots[depth]) return slots[depth];
    std::uint64_t n = 1;
    for (const auto& a : t.args()) n = std::min<std::uint64_t>(limit + 1, n + self(self, a, depth + 1));
    return slots[depth] = n;
  };
  if (term_depth(v) > 4096 && depth_cap == 0) return "<deep value; see dag statistics>";
  if (count(count, v, 0) > limit) {
    return "<" + std::to_string(limit) + "+ nodes within depth " + std::to_string(depth_cap) +
           "; see dag statistics>";
  }
  PrintOptions opts;
  opts.depth_cap = depth_cap;
  opts.compress_chains = true;
  return to_string(v, opts);
}

RunReport run_engine(const Program& p, const Term& input, const RunOptions& options) {
  RunReport r;
  r.engine = options.engine;
  PrintOptions in_opts;
  in_opts.compress_chains = true;
  r.input = to_string(input, in_opts);
  const auto start = std::chrono::steady_clock::now();
  switch (options.engine) {
    case Engine::Naive: {
      NaiveOutcome out = eval_cbv(p, input, options.budget.value_or(default_naive_budget));
      r.wall_ns = static_cast<std::uint64_t>(
          std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start).count());
      r.value = out.value;
      r.total_steps = out.steps;
      r.answer = store_value(r.heap, r.value);
      break;
    }
    case Engine::Memo: {
      CostedOutcome out = eval_memo(p, TermCache{}, input, options.budget);
      r.wall_ns = static_cast<std::uint64_t>(
          std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start).count());
      r.value = out.value;
      r.m = out.cost;
      r.total_steps = out.steps;
      r.cache_entries = out.cache.size();
      r.answer = store_value(r.heap, r.value);
      break;
    }
    case Engine::Shared: {
      if (input.is_variable() || !p.signature().is_operation(input.symbol())) {
        // A value evaluates to itself without any step.
        if (!p.is_value(input)) throw EvalError(EvalError::Kind::NotGround, "input is not ground", "shared");
        r.value = input;
        r.answer = store_value(r.heap, input);
        r.m = 0;
        r.heap_nodes = r.heap.size();
        break;
      }
      Configuration c = initial_configuration(p, Heap{}, input);
      MachineOptions mo;
      mo.record_trace = options.record_trace;
      RunResult out = run(p, std::move(c.heap), std::move(c.expr), options.budget, mo);
      r.wall_ns = static_cast<std::uint64_t>(
          std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start).count());
      r.answer = out.answer();
      r.m = out.stats.applies;
      r.total_steps = out.stats.total;
      r.heap_nodes = out.final.heap.size();
      r.cache_entries = out.final.cache.size();
      r.trace = std::move(out.trace);
      r.heap = std::move(out.final.heap);
      r.value = unfold(r.heap, r.answer);
      break;
    }
  }
  r.dag_nodes = reachable_count(r.heap, r.answer);
  r.unfolded_size = unfolded_size(r.heap, r.answer);
  r.result = render_value(r.value, options.depth_cap);
  return r;
}

void print_report(std::ostream& os, const RunReport& r, bool include_wall_time) {
  os << "engine: " << to_string(r.engine) << '\n'
     << "input: " << r.input << '\n'
     << "result: " << r.result << '\n'
     << "dag_nodes: " << r.dag_nodes << '\n'
     << "unfolded_size: " << r.unfolded_size << '\n'
     << "m: " << (r.m ? std::to_string(*r.m) : std::string("n/a")) << '\n'
     << "total_steps: " << r.total_steps << '\n'
     << "heap_nodes: " << r.heap_nodes << '\n'
     << "cache_entries: " << r.cache_entries << '\n';
  if (include_wall_time) os << "wall_ns: " << r.wall_ns << '\n';
}

CrossCheck check_all_engines(const Program& p, const Term& input, const RunOptions& options) {
  CrossCheck cc;
  for (Engine e : {Engine::Naive, Engine::Memo, Engine::Shared}) {
    RunOptions o = options;
    o.engine = e;
    if (e != options.engine) o.budget.reset();
    try {
      cc.reports.push_back(run_engine(p, input, o));
    } catch (const EvalError& err) {
      if (e == Engine::Naive && err.kind() == EvalError::Kind::BudgetExceeded) {
        cc.skipped.push_back(std::string("naive: ") + err.what());
        continue;
      }
      throw;
    }
  }
  const RunReport& ref = cc.reports.back();
  for (const auto& r : cc.reports) {
    if (!(r.value == ref.value)) {
      cc.disagreements.push_back(std::string(to_string(r.engine)) + " and shared return different values");
    }
  }
  const RunReport* memo = nullptr;
  for (const auto& r : cc.reports) {
    if (r.engine == Engine::Memo) memo = &r;
  }
  if (memo && memo->m != ref.m) {
    cc.disagreements.push_back("memo cost " + std::to_string(*memo->m) + " differs from shared apply count " +
                               std::to_string(*ref.m));
  }
  return cc;
}

std::string expand_family(std::string_view family, std::uint64_t n) {
  if (family == "sucN") return "suc^" + std::to_string(n) + "(zero)";
  std::string out(family);
  const std::string key = "{n}";
  std::size_t pos = out.find(key);
  if (pos == std::string::npos) throw std::invalid_argument("input family must be sucN or contain {n}");
  const std::string num = std::to_string(n);
  while (pos != std::string::npos) {
    out.replace(pos, key.size(), num);
    pos = out.find(key, pos + num.size());
  }
  return out;
}

BenchRow bench_point(const Program& p, const std::string& entry, std::string_view family, std::uint64_t n,
                     Engine engine, std::optional<std::uint64_t> budget) {
  BenchRow row{engine, n, std::nullopt, 0, 0, 0, "", 0, "ok"};
  Term input = parse_term(entry + "(" + expand_family(family, n) + ")", p.signature());
  RunOptions o;
  o.engine = engine;
  o.budget = budget;
  o.depth_cap = 1;
  try {
    RunReport r = run_engine(p, input, o);
    row.m = r.m;
    row.total_steps = r.total_steps;
    row.heap_nodes = r.heap_nodes;
    row.answer_dag_nodes = r.dag_nodes;
    row.unfolded_size =
        r.unfolded_size > std::numeric_limits<std::uint64_t>::max() ? "overflow" : r.unfolded_size.str();
    row.wall_ns = r.wall_ns;
  } catch (const EvalError& e) {
    row.status = e.kind() == EvalError::Kind::BudgetExceeded ? "budget" : "stuck";
  }
  return row;
}

void write_bench_header(std::ostream& os) {
  os << "engine,n,m,total_steps,heap_nodes,answer_dag_nodes,unfolded_size_or_overflow,wall_ns,status\n";
}

void write_bench_row(std::ostream& os, const BenchRow& r) {
  os << to_string(r.engine) << ',' << r.n << ',' << (r.m ? std::to_string(*r.m) : std::string()) << ','
     << r.total_steps << ',' << r.heap_nodes << ',' << r.answer_dag_nodes << ',' << r.unfolded_size << ','
     << r.wall_ns << ',' << r.status << '\n';
}

}  // namespace memodag
