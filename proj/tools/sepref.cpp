// sepref: check entailments, verify straight-line blocks, run the linked-list
// benchmark and validate hint databases.
//
// Exit codes: 0 proved / all good, 1 residual goal left or validation
// failure, 2 usage, parse or type error, 3 oracle disagreement.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "sepref/driver.hpp"

namespace {

using namespace sepref;

constexpr int kProved = 0;
constexpr int kResidual = 1;
constexpr int kError = 2;
constexpr int kUnsound = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void print_trace(const Trace& trace) {
  for (const TraceEvent& e : trace) {
    std::cout << "[" << e.phase << "] " << e.description;
    if (!e.before.empty()) std::cout << ": " << e.before;
    if (!e.after.empty()) std::cout << " => " << e.after;
    std::cout << "\n";
  }
}

struct GoalOptions {
  std::string goal_path;
  std::vector<std::string> hints;
  std::string prover;
  std::string memeval;
  std::size_t fuel = 10;
  bool validate = false;
  bool trace = false;
};

struct Loaded {
  HintDatabase db;
  GoalFile goal;
  Prover prover;
  MemEvaluator mev;
};

Loaded load(const GoalOptions& o) {
  HintDatabase db = load_hint_list(o.hints);
  if (o.validate) {
    for (const LemmaCheck& c : validate_hints(db))
      if (!c.ok) throw std::runtime_error("hint lemma '" + c.name + "' failed validation");
  }
  GoalFile goal;
  try {
    goal = parse_goal(read_file(o.goal_path), db.instrument());
  } catch (const ParseError& e) {
    throw std::runtime_error(o.goal_path + ":" + e.what());
  }
  if (auto err = check_envs(goal.envs, Interp::builtin())) throw std::runtime_error(*err);

  std::optional<Prover> prover = o.prover.empty() ? db.prover() : make_prover(o.prover);
  if (!prover) throw std::runtime_error("unknown prover '" + o.prover + "'");
  std::string mev_spec = o.memeval;
  if (mev_spec.empty()) {
    for (const auto& m : db.memevals) mev_spec += (mev_spec.empty() ? "" : "+") + m;
    if (mev_spec.empty()) mev_spec = "ptsto+array";
  }
  auto mev = make_mem_eval(mev_spec);
  if (!mev) throw std::runtime_error("unknown memory evaluator '" + mev_spec + "'");
  return {std::move(db), std::move(goal), std::move(*prover), std::move(*mev)};
}

int report(const Loaded& l, const CheckReport& rep) {
  if (rep.residual.mem_fault) {
    std::cout << "memory fault at instruction " << *rep.residual.mem_fault << "\n";
    return kResidual;
  }
  if (rep.proved) {
    std::cout << "proved (" << rep.unfold_count << " refinements)\n";
    return kProved;
  }
  std::cout << "residual:\n" << render_goal(residual_goal(l.goal.envs, rep.residual, l.goal.uvar_names));
  return kResidual;
}

void add_goal_options(CLI::App* cmd, GoalOptions& o) {
  cmd->add_option("goal", o.goal_path, "Goal file")->required();
  cmd->add_option("--hints", o.hints, "Hint database name (sll, bst) or file; repeatable");
  cmd->add_option("--prover", o.prover,
                  "Prover: reflexivity, assumption, word, bounds, order, default, or a +-list");
  cmd->add_option("--memeval", o.memeval, "Memory evaluator: ptsto, array, or a +-list");
  cmd->add_option("--fuel", o.fuel, "Refinement applications allowed per phase")
      ->capture_default_str();
  cmd->add_flag("--validate", o.validate, "Validate the hint lemmas before checking");
  cmd->add_flag("--trace", o.trace, "Print unfold/exec/cancel events");
}

int run_check(const GoalOptions& o, const std::optional<std::string>& oracle) {
  Loaded l = load(o);
  Trace trace;
  Trace* tp = o.trace ? &trace : nullptr;
  const CheckReport rep = l.goal.is_program
                              ? check_program(l.goal, l.db, l.prover, l.mev, o.fuel, tp)
                              : check_entailment(l.goal, l.db, l.prover, o.fuel, tp);
  print_trace(trace);
  const int code = report(l, rep);
  if (!oracle) return code;

  const ModelBounds bounds = !oracle->empty() ? parse_bounds(l.goal.envs, *oracle)
                             : l.db.bounds    ? *l.db.bounds
                                              : ModelBounds::desk();
  if (l.goal.is_program) {
    std::cout << "oracle: program goals are not cross-checked\n";
    return code;
  }
  const Interp interp = Interp::builtin();
  if (rep.proved) {
    auto cex = oracle_counterexample(l.goal.envs, interp, claim_query(l.goal, rep.residual), bounds);
    if (cex) {
      std::cout << "oracle disagreement: counterexample heap " << to_string(cex->heap) << "\n";
      return kUnsound;
    }
    std::cout << "oracle: agrees\n";
    return code;
  }
  OracleQuery q;
  q.lhs = l.goal.lhs;
  q.rhs = l.goal.rhs;
  q.var_types = l.goal.vars;
  q.uvar_types = l.goal.uvars;
  std::cout << (oracle_counterexample(l.goal.envs, interp, q, bounds)
                    ? "oracle: entailment fails at these bounds\n"
                    : "oracle: entailment holds at these bounds for every UVar assignment\n");
  return code;
}

int run_symexec(const GoalOptions& o) {
  Loaded l = load(o);
  if (!l.goal.is_program) throw std::runtime_error("goal has no program; use 'check'");
  Trace trace;
  Trace* tp = o.trace ? &trace : nullptr;
  const Block block = l.goal.block();
  ExecOutcome exec = execute_block(l.goal.envs, block, l.db, l.mev, l.prover, o.fuel, tp);
  if (auto* st = std::get_if<SymState>(&exec.result)) {
    const auto& names = st->state.var_names;
    std::cout << "registers:\n";
    for (std::size_t k = 0; k < st->regs.size(); ++k)
      std::cout << "  " << block.reg_names[k] << " = " << render_expr(l.goal.envs, st->regs[k], names)
                << "\n";
    SHeap post = st->state.heap;
    post.pures.insert(post.pures.begin(), st->state.pures.begin(), st->state.pures.end());
    std::cout << "postcondition:\n  " << render_heap(l.goal.envs, post, names) << "\n";
  }
  trace.clear();
  const CheckReport rep = check_program(l.goal, l.db, l.prover, l.mev, o.fuel, tp);
  print_trace(trace);
  return report(l, rep);
}

int run_bench(const std::string& family, const std::vector<std::size_t>& sizes,
              const std::string& csv_path) {
  if (family != "sll") throw std::runtime_error("unknown benchmark family '" + family + "'");
  std::ostringstream csv;
  csv << bench_csv_header() << "\n";
  bool ok = true;
  for (std::size_t n : sizes) {
    const BenchRow row = bench_sll(n);
    ok = ok && row.proved && row.unfold_count == n + 1;
    csv << bench_csv_row(row) << "\n";
  }
  std::cout << csv.str();
  if (!csv_path.empty()) {
    std::ofstream out(csv_path);
    if (!out) throw std::runtime_error("cannot write '" + csv_path + "'");
    out << csv.str();
  }
  return ok ? kProved : kResidual;
}

int run_validate(const std::vector<std::string>& names, const std::string& bounds_spec) {
  bool ok = true;
  for (const std::string& n : names) {
    const HintDatabase db = load_hints(n);
    std::optional<ModelBounds> bounds;
    if (!bounds_spec.empty()) bounds = parse_bounds(db.instrument(), bounds_spec);
    const ModelBounds shown = bounds ? *bounds : db.bounds ? *db.bounds : ModelBounds::desk();
    std::cout << n << " at " << render_bounds(db.instrument(), shown) << "\n";
    for (const LemmaCheck& c : validate_hints(db, bounds)) {
      std::cout << "  " << (c.ok ? "ok   " : "FAIL ") << c.name << "\n";
      ok = ok && c.ok;
    }
  }
  return ok ? kProved : kResidual;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Separation-logic entailment checking and block verification"};
  app.require_subcommand(1);

  GoalOptions check_opts;
  std::optional<std::string> oracle;
  auto* check = app.add_subcommand("check", "Check an entailment or program goal");
  add_goal_options(check, check_opts);
  check->add_option("--oracle", oracle,
                    "Cross-check against the finite-heap model (optional bounds, e.g. "
                    "\"addr=4 step=1 w=0,1,2,3\")")
      ->expected(0, 1);

  GoalOptions exec_opts;
  auto* symexec = app.add_subcommand("symexec", "Symbolically execute a program goal");
  add_goal_options(symexec, exec_opts);

  std::string family = "sll";
  std::vector<std::size_t> sizes{1, 2, 4, 8, 16, 32, 64};
  std::string csv_path;
  auto* bench = app.add_subcommand("bench", "Run the linked-list benchmark family");
  bench->add_option("--family", family, "Benchmark family")->capture_default_str();
  bench->add_option("--sizes", sizes, "List sizes")->delimiter(',');
  bench->add_option("--csv", csv_path, "Also write the CSV to this file");

  std::vector<std::string> dbs;
  std::string bounds_spec;
  auto* validate = app.add_subcommand("validate-hints", "Model-check hint lemmas");
  validate->add_option("db", dbs, "Hint database names or files")->required();
  validate->add_option("--bounds", bounds_spec, "Model bounds (default: the database's own)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kError;
  }

  try {
    if (check->parsed()) {
      // `--oracle` given without a value yields an empty string.
      if (check->count("--oracle") && !oracle) oracle = std::string();
      return run_check(check_opts, oracle);
    }
    if (symexec->parsed()) return run_symexec(exec_opts);
    if (bench->parsed()) return run_bench(family, sizes, csv_path);
    if (validate->parsed()) return run_validate(dbs, bounds_spec);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
  return kError;
}
