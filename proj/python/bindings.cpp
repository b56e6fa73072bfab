// Python bindings: goal checking, the list benchmark and hint validation.
// Goals and hint databases are passed as text in the documented format.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sepref/driver.hpp"

namespace py = pybind11;
using namespace sepref;

namespace {

struct Result {
  bool proved = false;
  std::size_t unfold_count = 0;
  double cancel_ms = 0;
  double total_ms = 0;
  std::optional<std::size_t> mem_fault;
  std::string residual;  // empty when proved
  std::vector<TraceEvent> trace;
  std::optional<bool> oracle_agrees;
};

struct Loaded {
  HintDatabase db;
  GoalFile goal;
  Prover prover;
  MemEvaluator mev;
};

Loaded load(const std::string& text, const std::vector<std::string>& hints, const std::string& prover,
            const std::string& memeval) {
  HintDatabase db = load_hint_list(hints);
  GoalFile goal = parse_goal(text, db.instrument());
  if (auto err = check_envs(goal.envs, Interp::builtin())) throw py::value_error(*err);
  std::optional<Prover> p = prover.empty() ? db.prover() : make_prover(prover);
  if (!p) throw py::value_error("unknown prover '" + prover + "'");
  std::string spec = memeval;
  if (spec.empty()) {
    for (const auto& m : db.memevals) spec += (spec.empty() ? "" : "+") + m;
    if (spec.empty()) spec = "ptsto+array";
  }
  auto mev = make_mem_eval(spec);
  if (!mev) throw py::value_error("unknown memory evaluator '" + spec + "'");
  return {std::move(db), std::move(goal), std::move(*p), std::move(*mev)};
}

Result check(const std::string& text, const std::vector<std::string>& hints, const std::string& prover,
             const std::string& memeval, std::size_t fuel, bool trace, std::optional<std::string> oracle) {
  const Loaded l = load(text, hints, prover, memeval);
  Result out;
  CheckReport rep;
  {
    py::gil_scoped_release release;
    rep = l.goal.is_program ? check_program(l.goal, l.db, l.prover, l.mev, fuel, &out.trace)
                            : check_entailment(l.goal, l.db, l.prover, fuel, &out.trace);
  }
  if (!trace) out.trace.clear();
  out.proved = rep.proved;
  out.unfold_count = rep.unfold_count;
  out.cancel_ms = rep.cancel_ms;
  out.total_ms = rep.total_ms;
  out.mem_fault = rep.residual.mem_fault;
  if (!rep.proved && !rep.residual.mem_fault)
    out.residual = render_goal(residual_goal(l.goal.envs, rep.residual, l.goal.uvar_names));
  if (oracle && rep.proved && !l.goal.is_program) {
    const ModelBounds b = !oracle->empty() ? parse_bounds(l.goal.envs, *oracle)
                          : l.db.bounds    ? *l.db.bounds
                                           : ModelBounds::desk();
    py::gil_scoped_release release;
    out.oracle_agrees =
        !oracle_counterexample(l.goal.envs, Interp::builtin(), claim_query(l.goal, rep.residual), b);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Separation-logic entailment checking by unfolding and cancellation";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

  py::class_<TraceEvent>(m, "TraceEvent")
      .def_readonly("phase", &TraceEvent::phase)
      .def_readonly("description", &TraceEvent::description)
      .def_readonly("before", &TraceEvent::before)
      .def_readonly("after", &TraceEvent::after)
      .def("__repr__", [](const TraceEvent& e) { return "<TraceEvent " + e.phase + ": " + e.description + ">"; });

  py::class_<Result>(m, "CheckResult")
      .def_readonly("proved", &Result::proved)
      .def_readonly("unfold_count", &Result::unfold_count)
      .def_readonly("cancel_ms", &Result::cancel_ms)
      .def_readonly("total_ms", &Result::total_ms)
      .def_readonly("mem_fault", &Result::mem_fault, "Index of the faulting instruction, if any")
      .def_readonly("residual", &Result::residual, "Residual goal text; empty when proved")
      .def_readonly("trace", &Result::trace)
      .def_readonly("oracle_agrees", &Result::oracle_agrees, "None unless an oracle run was requested")
      .def("__bool__", [](const Result& r) { return r.proved; })
      .def("__repr__", [](const Result& r) {
        return std::string("<CheckResult ") + (r.proved ? "proved" : "residual") + ">";
      });

  py::class_<BenchRow>(m, "BenchRow")
      .def_readonly("n", &BenchRow::n)
      .def_readonly("unfold_count", &BenchRow::unfold_count)
      .def_readonly("cancel_ms", &BenchRow::cancel_ms)
      .def_readonly("total_ms", &BenchRow::total_ms)
      .def_readonly("proved", &BenchRow::proved)
      .def("csv", &bench_csv_row);

  m.def("check", &check, py::arg("goal"), py::arg("hints") = std::vector<std::string>{},
        py::arg("prover") = "", py::arg("memeval") = "", py::arg("fuel") = 10, py::arg("trace") = false,
        py::arg("oracle") = std::nullopt,
        "Check an entailment or program goal given as text. `oracle` is a bounds string "
        "(\"\" for the database's bounds); when set and the goal is proved, the model checker "
        "cross-checks the claim.");

  m.def(
      "normalize_goal",
      [](const std::string& text, const std::vector<std::string>& hints) {
        return render_goal(parse_goal(text, load_hint_list(hints).instrument()));
      },
      py::arg("goal"), py::arg("hints") = std::vector<std::string>{}, "Parse a goal and render it back");

  m.def("builtin_hints", [](const std::string& name) -> std::optional<std::string> {
    auto t = builtin_hints(name);
    return t ? std::optional<std::string>(std::string(*t)) : std::nullopt;
  });

  m.def(
      "validate_hints",
      [](const std::string& db, const std::string& bounds) {
        const HintDatabase h = load_hints(db);
        std::optional<ModelBounds> b;
        if (!bounds.empty()) b = parse_bounds(h.instrument(), bounds);
        std::vector<std::pair<std::string, bool>> out;
        for (const LemmaCheck& c : validate_hints(h, b)) out.emplace_back(c.name, c.ok);
        return out;
      },
      py::arg("db"), py::arg("bounds") = "", "(lemma name, ok) for every lemma of a database");

  m.def("bench_sll", &bench_sll, py::arg("n"), py::call_guard<py::gil_scoped_release>());
  m.def("bench_csv_header", &bench_csv_header);
}
