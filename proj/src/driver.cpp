#include "sepref/driver.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "builtin_hints.hpp"

namespace sepref {

std::optional<std::string_view> builtin_hints(std::string_view name) {
  if (name == "sll") return kSllHints;
  if (name == "bst") return kBstHints;
  return std::nullopt;
}

HintDatabase load_hints(const std::string& name_or_path) {
  if (auto text = builtin_hints(name_or_path)) return parse_hints(*text);
  std::ifstream in(name_or_path);
  if (!in) throw std::runtime_error("unknown hint database '" + name_or_path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_hints(buf.str());
  } catch (const ParseError& e) {
    throw std::runtime_error(name_or_path + ":" + e.what());
  }
}

HintDatabase load_hint_list(const std::vector<std::string>& names) {
  HintDatabase db = empty_db();
  for (const auto& n : names) {
    auto next = compose_db(db, load_hints(n));
    if (!next) throw std::runtime_error("hint database '" + n + "' conflicts with earlier ones");
    db = std::move(*next);
  }
  return db;
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// Split the heap's own pures and existentials off into the state.
UnfoldState open_hypothesis(const GoalFile& goal) {
  const std::size_t nv = goal.vars.size();
  SHeap lhs = normalize(goal.lhs, nv);
  UnfoldState st;
  st.vars = goal.vars;
  st.var_names = goal.var_names;
  st.var_names.resize(nv);
  st.vars.insert(st.vars.end(), lhs.exists.begin(), lhs.exists.end());
  st.var_names.insert(st.var_names.end(), lhs.exists_names.begin(), lhs.exists_names.end());
  st.uvars = goal.uvars;
  st.pures = std::move(lhs.pures);
  lhs.pures.clear();
  lhs.exists.clear();
  lhs.exists_names.clear();
  st.heap = std::move(lhs);
  return st;
}

}  // namespace

CheckReport check_entailment(const GoalFile& goal, const HintDatabase& db, const Prover& prover,
                             std::size_t fuel, Trace* trace) {
  const auto t0 = Clock::now();
  const Envs& envs = goal.envs;
  const std::size_t nv = goal.vars.size();
  CheckReport rep;

  UnfoldResult fwd = unfold(envs, open_hypothesis(goal), db, Direction::Forward, fuel, prover, trace);
  rep.unfold_count += fwd.applications;

  // Conclusion binders become fresh UVars after the goal's.
  SHeap rhs = normalize(goal.rhs, nv);
  UnfoldState concl;
  concl.vars = fwd.state.vars;
  concl.var_names = fwd.state.var_names;
  concl.pures = fwd.state.pures;
  concl.uvars = fwd.state.uvars;
  const std::size_t first = concl.uvars.size();
  concl.uvars.insert(concl.uvars.end(), rhs.exists.begin(), rhs.exists.end());
  concl.heap = map_exprs(rhs, [&](const Expr& e) {
    return map_vars(e, [&](std::size_t n) {
      return n >= nv ? Expr::uvar(first + n - nv) : Expr::var(n);
    });
  });
  concl.heap.exists.clear();
  concl.heap.exists_names.clear();
  UnfoldResult bwd = unfold(envs, std::move(concl), db, Direction::Backward, fuel, prover, trace);
  rep.unfold_count += bwd.applications;

  CancelInput in;
  in.vars = fwd.state.vars;
  in.var_names = fwd.state.var_names;
  in.uvars = bwd.state.uvars;
  in.caller_uvars = goal.uvars.size();
  in.uvar_scope = nv;
  in.lhs = std::move(fwd.state.heap);
  in.lhs.pures = std::move(fwd.state.pures);
  in.rhs = std::move(bwd.state.heap);
  const auto c0 = Clock::now();
  rep.residual = cancel_heaps(envs, in, prover, trace);
  rep.proved = residual_trivial(envs, rep.residual, prover);
  rep.cancel_ms = ms_since(c0);
  rep.total_ms = ms_since(t0);
  return rep;
}

CheckReport check_program(const GoalFile& goal, const HintDatabase& db, const Prover& prover,
                          const MemEvaluator& mev, std::size_t fuel, Trace* trace) {
  const auto t0 = Clock::now();
  CheckReport rep;
  VerifyResult v = verify_block(goal.envs, goal.block(), db, mev, prover, fuel, trace);
  rep.residual = std::move(v.residual);
  rep.unfold_count = v.applications;
  rep.proved = residual_trivial(goal.envs, rep.residual, prover);
  rep.total_ms = ms_since(t0);
  return rep;
}

OracleQuery claim_query(const GoalFile& goal, const Residual& r) {
  const std::size_t nv = goal.vars.size();
  const std::size_t pre = r.pre_uvars.size();
  const std::size_t k = r.exists_left.size();
  Subst rhs_sub, lhs_sub;
  for (const auto& [u, image] : r.uvar_equations) {
    bool uses_left = false;
    const Expr closed = map_uvars(image, [&](std::size_t n) {
      if (n >= pre && n - pre < k) {
        uses_left = true;
        return Expr::var(nv + n - pre);
      }
      return Expr::uvar(n);
    });
    rhs_sub.bind(u, closed);
    if (!uses_left) lhs_sub.bind(u, image);
  }
  Sexpr rhs = instantiate(rhs_sub, lift_sexpr(goal.rhs, nv, k));
  for (std::size_t i = k; i-- > 0;) rhs = Sexpr::exists(r.exists_left[i], rhs);

  OracleQuery q;
  q.lhs = instantiate(lhs_sub, goal.lhs);
  q.rhs = rhs;
  q.var_types = goal.vars;
  q.uvar_types = goal.uvars;
  return q;
}

GoalFile gen_sll_goal(std::size_t n) {
  std::ostringstream text;
  for (std::size_t i = 0; i <= n; ++i) text << "(var p" << i << " w)\n";
  for (std::size_t i = 0; i < n; ++i) text << "(var x" << i << " w)\n";
  text << "(entail ";
  for (std::size_t i = 0; i < n; ++i)
    text << "[| p" << i << " != 0 |] * ptsto(p" << i << ", x" << i << ") * ptsto(p" << i
         << " + 4, p" << i + 1 << ") * ";
  text << "[| p" << n << " = 0 |]\n  ===> sll(";
  for (std::size_t i = 0; i < n; ++i) text << "cons(x" << i << ", ";
  text << "nil" << std::string(n, ')') << ", p0))\n";
  static const Envs base = parse_hints(kSllHints).instrument();
  return parse_goal(text.str(), base);
}

BenchRow bench_sll(std::size_t n) {
  static const HintDatabase db = parse_hints(kSllHints);
  const GoalFile goal = gen_sll_goal(n);
  const Prover prover = db.prover();
  CheckReport rep = check_entailment(goal, db, prover, 2 * n + 16);
  return {n, rep.unfold_count, rep.cancel_ms, rep.total_ms, rep.proved};
}

std::string bench_csv_header() { return "n,unfold_count,cancel_time_ms,total_time_ms,verdict"; }

std::string bench_csv_row(const BenchRow& row) {
  std::ostringstream out;
  out << row.n << "," << row.unfold_count << "," << std::fixed << std::setprecision(3)
      << row.cancel_ms << "," << row.total_ms << "," << (row.proved ? "proved" : "residual");
  return out.str();
}

std::vector<LemmaCheck> validate_hints(const HintDatabase& db,
                                       const std::optional<ModelBounds>& bounds) {
  const Envs envs = db.instrument();
  const Interp interp = Interp::builtin();
  const ModelBounds b = bounds ? *bounds : db.bounds ? *db.bounds : ModelBounds::desk();
  std::vector<LemmaCheck> out;
  for (const HintLemma& l : db.lemmas) out.push_back({l.name, validate_lemma(envs, interp, l, b)});
  return out;
}

}  // namespace sepref
