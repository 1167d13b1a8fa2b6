// Command-line front end: run, check, tier, compile, bench.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "memodag/cli.hpp"
#include "memodag/grsr.hpp"
#include "memodag/parse.hpp"
#include "memodag/tiers.hpp"

using namespace memodag;

namespace {

constexpr int exit_parse = 2;
constexpr int exit_stuck = 3;
constexpr int exit_budget = 4;
constexpr int exit_disagreement = 5;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

int eval_error_code(const EvalError& e) {
  return e.kind() == EvalError::Kind::BudgetExceeded ? exit_budget : exit_stuck;
}

struct RunArgs {
  std::string program;
  std::string term;
  std::string engine = "shared";
  std::string budget;
  std::string dot;
  std::string trace;
  bool check_all = false;
  std::size_t depth_cap = 16;
};

int cmd_run(const RunArgs& a) {
  Program p = parse_program(read_file(a.program));
  Term input = parse_term(a.term, p.signature());
  RunOptions o;
  auto engine = parse_engine(a.engine);
  if (!engine) throw CLI::ValidationError("--engine", "expected naive, memo or shared");
  o.engine = *engine;
  if (!a.budget.empty()) o.budget = parse_budget(a.budget);
  o.depth_cap = a.depth_cap;
  o.record_trace = !a.trace.empty();

  RunReport report;
  int code = 0;
  if (a.check_all) {
    CrossCheck cc = check_all_engines(p, input, o);
    for (const auto& r : cc.reports) {
      if (r.engine == o.engine) report = r;
    }
    for (const auto& r : cc.reports) {
      std::cout << to_string(r.engine) << ": m=" << (r.m ? std::to_string(*r.m) : std::string("n/a"))
                << " total_steps=" << r.total_steps << " dag_nodes=" << r.dag_nodes << '\n';
    }
    for (const auto& s : cc.skipped) std::cout << "skipped " << s << '\n';
    for (const auto& d : cc.disagreements) std::cout << "disagreement: " << d << '\n';
    std::cout << (cc.disagreements.empty() ? "engines agree" : "engines disagree") << '\n';
    if (!cc.disagreements.empty()) code = exit_disagreement;
    if (cc.reports.empty() || report.input.empty()) return code;
  } else {
    report = run_engine(p, input, o);
  }
  print_report(std::cout, report);
  if (!a.dot.empty()) {
    std::ofstream out(a.dot);
    if (!out) throw std::runtime_error("cannot write " + a.dot);
    write_dot(out, report.heap, report.answer);
  }
  if (!a.trace.empty()) {
    if (report.engine != Engine::Shared) throw CLI::ValidationError("--trace", "traces need --engine shared");
    std::ofstream out(a.trace);
    if (!out) throw std::runtime_error("cannot write " + a.trace);
    write_trace_csv(out, report.trace);
  }
  return code;
}

int cmd_check(const std::string& path) {
  ProgramText text = parse_program_text(read_file(path));
  auto violations = orthogonality_violations(text.signature, text.rules);
  if (violations.empty()) {
    std::cout << "orthogonal\n";
    return 0;
  }
  for (const auto& v : violations) std::cout << v.message << '\n';
  return 1;
}

std::string signature_text(const GrsrDefinition& d, const TierSignature& s) {
  std::vector<std::string> ins;
  for (const auto& in : d.inputs) ins.push_back(in.algebra);
  while (ins.size() < s.inputs.size()) ins.push_back("A");
  return to_string(s, ins, d.output.algebra.empty() ? "A" : d.output.algebra);
}

int cmd_tier(const std::string& path, std::optional<unsigned> tmax) {
  GrsrFile file = parse_grsr(read_file(path));
  bool all_ok = true;
  for (const auto& d : file.definitions) {
    const unsigned bound = tmax.value_or(default_tier_bound(d.body));
    if (d.fully_tiered()) {
      TierSignature s;
      for (const auto& in : d.inputs) s.inputs.push_back(*in.tier);
      s.output = *d.output.tier;
      TierCheck c = check_tiers(d.body, s, std::max({bound, s.output, s.inputs.empty() ? 0u : *std::max_element(s.inputs.begin(), s.inputs.end())}));
      if (c) {
        std::cout << d.name << ": accepted at " << signature_text(d, s) << '\n';
      } else {
        all_ok = false;
        std::cout << d.name << ": rejected at " << signature_text(d, s) << ": " << c.blocking << '\n';
      }
      continue;
    }
    auto found = infer_tiers(d.body, bound);
    if (found.empty()) {
      all_ok = false;
      auto why = untierable_reason(d.body);
      std::cout << d.name << ": rejected: no signature with tiers <= " << bound
                << (why ? ": " + *why : std::string()) << '\n';
      continue;
    }
    std::cout << d.name << ": accepted at " << found.size() << " signature(s) with tiers <= " << bound << ", e.g. "
              << signature_text(d, found.front()) << '\n';
  }
  return all_ok ? 0 : 1;
}

int cmd_compile(const std::string& path, const std::string& name, const std::string& output) {
  GrsrFile file = parse_grsr(read_file(path));
  if (file.definitions.empty()) throw std::runtime_error(path + " has no definitions");
  const GrsrDefinition* d = name.empty() ? &file.definitions.back() : file.definition(name);
  if (!d) throw std::runtime_error("no definition named " + name);
  CompiledFunction c = compile(d->body, d->name, file.algebras);
  std::string text = "// entry: " + c.entry.name() + "\n" + pretty_print(c.program);
  if (output.empty()) {
    std::cout << text;
  } else {
    write_file(output, text);
  }
  return 0;
}

struct BenchArgs {
  std::string program;
  std::string entry;
  std::string family;
  std::string range;
  std::vector<std::string> engines{"shared"};
  std::string budget;
  std::string csv;
};

int cmd_bench(const BenchArgs& a) {
  Program p = parse_program(read_file(a.program));
  std::uint64_t lo = 0, hi = 0;
  auto dots = a.range.find("..");
  try {
    if (dots == std::string::npos) {
      lo = hi = std::stoull(a.range);
    } else {
      lo = std::stoull(a.range.substr(0, dots));
      hi = std::stoull(a.range.substr(dots + 2));
    }
  } catch (const std::exception&) {
    throw CLI::ValidationError("range", "expected N or A..B");
  }
  std::optional<std::uint64_t> budget;
  if (!a.budget.empty()) budget = parse_budget(a.budget);
  std::vector<Engine> engines;
  for (const auto& e : a.engines) {
    auto eng = parse_engine(e);
    if (!eng) throw CLI::ValidationError("--engine", "expected naive, memo or shared");
    engines.push_back(*eng);
  }
  std::ofstream file;
  if (!a.csv.empty()) {
    file.open(a.csv);
    if (!file) throw std::runtime_error("cannot write " + a.csv);
  }
  std::ostream& out = a.csv.empty() ? std::cout : file;
  write_bench_header(out);
  for (Engine e : engines) {
    for (std::uint64_t n = lo; n <= hi; ++n) write_bench_row(out, bench_point(p, a.entry, a.family, n, e, budget));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evaluate constructor rewrite programs with memoization and sharing"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Evaluate a ground call");
  run->add_option("program", run_args.program, "Program file")->required();
  run->add_option("term", run_args.term, "Ground term, e.g. \"tree(suc^4(zero))\"")->required();
  run->add_option("--engine", run_args.engine, "naive, memo or shared")->check(CLI::IsMember({"naive", "memo", "shared"}));
  run->add_option("--budget", run_args.budget, "Step budget, e.g. 10^6");
  run->add_option("--dot", run_args.dot, "Write the result DAG in Graphviz format");
  run->add_option("--trace", run_args.trace, "Write the machine trace as CSV (shared engine)");
  run->add_flag("--check-all", run_args.check_all, "Run all engines and compare");
  run->add_option("--depth-cap", run_args.depth_cap, "Depth up to which the result is printed");

  std::string check_path;
  auto* check = app.add_subcommand("check", "Check a program for orthogonality");
  check->add_option("program", check_path, "Program file")->required();

  std::string tier_path;
  std::optional<unsigned> tmax;
  auto* tier = app.add_subcommand("tier", "Check or infer tiers of combinator definitions");
  tier->add_option("file", tier_path, "Definition file")->required();
  tier->add_option("--tmax", tmax, "Largest tier considered");

  std::string compile_path, compile_name, compile_out;
  auto* comp = app.add_subcommand("compile", "Compile a combinator definition to a program");
  comp->add_option("file", compile_path, "Definition file")->required();
  comp->add_option("definition", compile_name, "Definition to compile (default: the last one)");
  comp->add_option("-o,--output", compile_out, "Output program file");

  BenchArgs bench_args;
  auto* bench = app.add_subcommand("bench", "Cost curves over an input family as CSV");
  bench->add_option("program", bench_args.program, "Program file")->required();
  bench->add_option("entry", bench_args.entry, "Operation to call")->required();
  bench->add_option("family", bench_args.family, "sucN, or arguments containing {n}")->required();
  bench->add_option("range", bench_args.range, "n range A..B")->required();
  bench->add_option("--engine", bench_args.engines, "Engines to run")->check(CLI::IsMember({"naive", "memo", "shared"}));
  bench->add_option("--budget", bench_args.budget, "Step budget per run");
  bench->add_option("--csv", bench_args.csv, "Write CSV to a file instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(run_args);
    if (*check) return cmd_check(check_path);
    if (*tier) return cmd_tier(tier_path, tmax);
    if (*comp) return cmd_compile(compile_path, compile_name, compile_out);
    if (*bench) return cmd_bench(bench_args);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return exit_parse;
  } catch (const ProgramError& e) {
    std::cerr << "invalid program: " << e.what() << '\n';
    return exit_parse;
  } catch (const EvalError& e) {
    std::cerr << (e.kind() == EvalError::Kind::BudgetExceeded ? "budget exceeded" : "evaluation failed");
    if (!e.engine().empty()) std::cerr << " (" << e.engine() << ")";
    std::cerr << ": " << e.what() << '\n';
    return eval_error_code(e);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
