// Python bindings: program loading, the three engines, tier checking and
// compilation of combinator definitions.
#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "memodag/bigstep.hpp"
#include "memodag/cli.hpp"
#include "memodag/grsr.hpp"
#include "memodag/parse.hpp"
#include "memodag/program.hpp"
#include "memodag/tiers.hpp"

namespace py = pybind11;
using namespace memodag;

namespace {

py::dict report_dict(const RunReport& r) {
  py::dict d;
  d["engine"] = to_string(r.engine);
  d["result"] = r.result;
  d["dag_nodes"] = r.dag_nodes;
  d["unfolded_size"] = r.unfolded_size.str();
  d["m"] = r.m ? py::cast(*r.m) : py::none();
  d["total_steps"] = r.total_steps;
  d["heap_nodes"] = r.heap_nodes;
  d["cache_entries"] = r.cache_entries;
  return d;
}

Engine engine_of(const std::string& name) {
  auto e = parse_engine(name);
  if (!e) throw py::value_error("unknown engine: " + name);
  return *e;
}

py::list tier_report(const std::string& text, std::optional<unsigned> tmax) {
  GrsrFile file = parse_grsr(text);
  py::list out;
  for (const auto& d : file.definitions) {
    py::dict row;
    row["name"] = d.name;
    const unsigned bound = tmax.value_or(default_tier_bound(d.body));
    std::vector<TierSignature> found;
    if (d.fully_tiered()) {
      TierSignature s;
      unsigned top = bound;
      for (const auto& in : d.inputs) {
        s.inputs.push_back(*in.tier);
        top = std::max(top, *in.tier);
      }
      s.output = *d.output.tier;
      top = std::max(top, s.output);
      if (check_tiers(d.body, s, top)) found.push_back(s);
    } else {
      found = infer_tiers(d.body, bound);
    }
    row["accepted"] = !found.empty();
    py::list sigs;
    for (const auto& s : found) sigs.append(to_string(s));
    row["signatures"] = sigs;
    auto why = found.empty() ? untierable_reason(d.body) : std::nullopt;
    row["reason"] = why ? py::cast(*why) : py::none();
    out.append(row);
  }
  return out;
}

std::string compile_definition(const std::string& text, const std::string& name) {
  GrsrFile file = parse_grsr(text);
  if (file.definitions.empty()) throw py::value_error("no definitions");
  const GrsrDefinition* d = name.empty() ? &file.definitions.back() : file.definition(name);
  if (!d) throw py::value_error("no definition named " + name);
  return pretty_print(compile(d->body, d->name, file.algebras).program);
}

}  // namespace

PYBIND11_MODULE(_memodag, m) {
  m.doc() = "Memoizing evaluation of orthogonal constructor rewrite programs";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ProgramError>(m, "ProgramError", PyExc_ValueError);
  py::register_exception<GrsrError>(m, "GrsrError", PyExc_ValueError);
  py::register_exception<EvalError>(m, "EvalError", PyExc_RuntimeError);

  py::class_<Program>(m, "Program")
      .def_static("parse", &parse_program, py::arg("text"))
      .def_property_readonly("delta", &Program::delta)
      .def_property_readonly("rule_count", [](const Program& p) { return p.rules().size(); })
      .def("__str__", &pretty_print);

  m.def(
      "orthogonality_violations",
      [](const std::string& text) {
        ProgramText t = parse_program_text(text);
        std::vector<std::string> out;
        for (const auto& v : orthogonality_violations(t.signature, t.rules)) out.push_back(v.message);
        return out;
      },
      py::arg("text"));

  m.def(
      "run",
      [](const Program& p, const std::string& term, const std::string& engine, std::optional<std::uint64_t> budget) {
        RunOptions o;
        o.engine = engine_of(engine);
        o.budget = budget;
        RunReport r;
        {
          py::gil_scoped_release release;
          r = run_engine(p, parse_term(term, p.signature()), o);
        }
        return report_dict(r);
      },
      py::arg("program"), py::arg("term"), py::arg("engine") = "shared", py::arg("budget") = py::none());

  m.def(
      "check_all",
      [](const Program& p, const std::string& term, std::optional<std::uint64_t> budget) {
        RunOptions o;
        o.budget = budget;
        CrossCheck c = check_all_engines(p, parse_term(term, p.signature()), o);
        py::dict d;
        py::list reports;
        for (const auto& r : c.reports) reports.append(report_dict(r));
        d["reports"] = reports;
        d["skipped"] = c.skipped;
        d["disagreements"] = c.disagreements;
        return d;
      },
      py::arg("program"), py::arg("term"), py::arg("budget") = py::none());

  m.def(
      "bench_csv",
      [](const Program& p, const std::string& entry, const std::string& family, std::uint64_t from, std::uint64_t to,
         const std::string& engine, std::optional<std::uint64_t> budget) {
        std::ostringstream os;
        write_bench_header(os);
        for (std::uint64_t n = from; n <= to; ++n)
          write_bench_row(os, bench_point(p, entry, family, n, engine_of(engine), budget));
        return os.str();
      },
      py::arg("program"), py::arg("entry"), py::arg("family"), py::arg("start"), py::arg("stop"),
      py::arg("engine") = "shared", py::arg("budget") = py::none());

  m.def("tiers", &tier_report, py::arg("text"), py::arg("tmax") = py::none());
  m.def("compile", &compile_definition, py::arg("text"), py::arg("name") = "");
}
