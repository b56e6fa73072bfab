#include "sepref/symexec.hpp"

#include "sepref/syntax.hpp"

namespace sepref {

namespace {

bool has_interp(const Envs& envs, const Expr& e, std::string_view interp, std::size_t arity) {
  return e.is(Expr::Kind::Func) && envs.funcs[e.index()].interp == interp &&
         e.args().size() == arity;
}

std::optional<std::uint32_t> word_literal(const Expr& e) {
  if (!e.is(Expr::Kind::Const)) return std::nullopt;
  if (const auto* w = std::get_if<Word>(&e.literal())) return w->v;
  return std::nullopt;
}

bool provably_equal(const Envs& envs, const Prover& prover, const Facts& facts, const Tvar& t,
                    const Expr& a, const Expr& b) {
  return expr_syntactic_eq(envs, a, b) || prover.prove(facts, Expr::equal(t, a, b));
}

// The ptsto atom whose address `addr` provably denotes; returns (pred, position in its list).
std::optional<std::pair<std::size_t, std::size_t>> find_cell(const Envs& envs,
                                                             const Prover& prover,
                                                             const Facts& facts, const SHeap& h,
                                                             const Expr& addr) {
  for (const auto& [p, list] : h.impures) {
    const PredSig& sig = envs.preds[p];
    if (sig.interp != "ptsto" || sig.domain.size() != 2) continue;
    for (std::size_t k = 0; k < list.size(); ++k)
      if (provably_equal(envs, prover, facts, sig.domain[0], addr, list[k][0])) return {{p, k}};
  }
  return std::nullopt;
}

struct ArrayHit {
  std::size_t pred;
  std::size_t pos;
  Expr index;
};

// Split an address into (base, index) with address = base + 4 * index.
std::vector<std::pair<Expr, Expr>> address_forms(const Envs& envs, const Expr& addr,
                                                 const Tvar& word) {
  std::vector<std::pair<Expr, Expr>> out;
  if (has_interp(envs, addr, "plus", 2)) {
    const Expr& b = addr.args()[0];
    const Expr& off = addr.args()[1];
    if (has_interp(envs, off, "mult", 2)) {
      if (word_literal(off.args()[0]) == 4u) out.emplace_back(b, off.args()[1]);
      if (word_literal(off.args()[1]) == 4u) out.emplace_back(b, off.args()[0]);
    }
    if (auto k = word_literal(off); k && *k % 4 == 0)
      out.emplace_back(b, Expr::constant(word, Word{*k / 4}));
  }
  out.emplace_back(addr, Expr::constant(word, Word{0}));
  return out;
}

std::optional<ArrayHit> find_slot(const Envs& envs, const Prover& prover, const Facts& facts,
                                  const SHeap& h, const Expr& addr) {
  const auto lt = envs.func_by_interp("lt");
  const auto len = envs.func_by_interp("len");
  if (!lt || !len) return std::nullopt;
  for (const auto& [p, list] : h.impures) {
    const PredSig& sig = envs.preds[p];
    if (sig.interp != "array" || sig.domain.size() != 2) continue;
    const Tvar& word = sig.domain[1];
    for (std::size_t k = 0; k < list.size(); ++k) {
      const Expr& ws = list[k][0];
      const Expr& base = list[k][1];
      for (const auto& [b, i] : address_forms(envs, addr, word)) {
        if (!provably_equal(envs, prover, facts, word, b, base)) continue;
        if (!prover.prove(facts, Expr::func(*lt, {i, Expr::func(*len, {ws})}))) continue;
        return ArrayHit{p, k, i};
      }
    }
  }
  return std::nullopt;
}

// sel(upd(ws, i, v), i) = v.
Expr select(const Envs& envs, std::size_t sel, const Expr& ws, const Expr& i) {
  if (has_interp(envs, ws, "upd", 3) && expr_syntactic_eq(envs, ws.args()[1], i))
    return ws.args()[2];
  return Expr::func(sel, {ws, i});
}

}  // namespace

MemEvaluator ptsto_eval() {
  MemEvaluator m;
  m.name = "ptsto";
  m.sread = [](const Envs& envs, const Prover& prover, const Facts& facts, const SHeap& h,
               const Expr& addr) -> std::optional<Expr> {
    auto cell = find_cell(envs, prover, facts, h, addr);
    if (!cell) return std::nullopt;
    return h.impures.at(cell->first)[cell->second][1];
  };
  m.swrite = [](const Envs& envs, const Prover& prover, const Facts& facts, const SHeap& h,
                const Expr& addr, const Expr& val) -> std::optional<SHeap> {
    auto cell = find_cell(envs, prover, facts, h, addr);
    if (!cell) return std::nullopt;
    SHeap out = h;
    out.impures[cell->first][cell->second][1] = val;
    return out;
  };
  return m;
}

MemEvaluator array_eval() {
  MemEvaluator m;
  m.name = "array";
  m.sread = [](const Envs& envs, const Prover& prover, const Facts& facts, const SHeap& h,
               const Expr& addr) -> std::optional<Expr> {
    const auto sel = envs.func_by_interp("sel");
    if (!sel) return std::nullopt;
    auto hit = find_slot(envs, prover, facts, h, addr);
    if (!hit) return std::nullopt;
    return select(envs, *sel, h.impures.at(hit->pred)[hit->pos][0], hit->index);
  };
  m.swrite = [](const Envs& envs, const Prover& prover, const Facts& facts, const SHeap& h,
                const Expr& addr, const Expr& val) -> std::optional<SHeap> {
    const auto upd = envs.func_by_interp("upd");
    if (!upd) return std::nullopt;
    auto hit = find_slot(envs, prover, facts, h, addr);
    if (!hit) return std::nullopt;
    SHeap out = h;
    Expr& ws = out.impures[hit->pred][hit->pos][0];
    ws = Expr::func(*upd, {ws, hit->index, val});
    return out;
  };
  return m;
}

MemEvaluator compose_mem_evals(const MemEvaluator& m1, const MemEvaluator& m2) {
  MemEvaluator m;
  m.name = m1.name + "+" + m2.name;
  m.sread = [m1, m2](const Envs& envs, const Prover& prover, const Facts& facts, const SHeap& h,
                     const Expr& addr) {
    auto v = m1.sread(envs, prover, facts, h, addr);
    return v ? v : m2.sread(envs, prover, facts, h, addr);
  };
  m.swrite = [m1, m2](const Envs& envs, const Prover& prover, const Facts& facts,
                      const SHeap& h, const Expr& addr, const Expr& val) {
    auto out = m1.swrite(envs, prover, facts, h, addr, val);
    return out ? out : m2.swrite(envs, prover, facts, h, addr, val);
  };
  return m;
}

std::optional<MemEvaluator> make_mem_eval(std::string_view spec) {
  std::optional<MemEvaluator> out;
  std::size_t start = 0;
  while (start <= spec.size()) {
    std::size_t end = spec.find('+', start);
    if (end == std::string_view::npos) end = spec.size();
    const std::string_view name = spec.substr(start, end - start);
    MemEvaluator m;
    if (name == "ptsto")
      m = ptsto_eval();
    else if (name == "array")
      m = array_eval();
    else
      return std::nullopt;
    out = out ? compose_mem_evals(*out, m) : m;
    start = end + 1;
  }
  return out;
}

namespace {

Expr at_regs(const Expr& e, const std::vector<Expr>& regs) {
  return map_vars(e, [&](std::size_t k) { return k < regs.size() ? regs[k] : Expr::var(k); });
}

std::string show(const Envs& envs, const SymState& st) {
  return render_heap(envs, st.state.heap, st.state.var_names);
}

}  // namespace

std::variant<SymState, MemFault> sym_exec(const Envs& envs, SymState st,
                                          const std::vector<Instr>& prog, const MemEvaluator& mev,
                                          const Prover& prover, const HintDatabase& db,
                                          std::size_t fuel, Trace* trace) {
  // Run `access`; on failure refine the state once and retry.
  auto with_refinement = [&](auto access) -> bool {
    if (access()) return true;
    UnfoldResult refined = unfold(envs, st.state, db, Direction::Forward, fuel, prover, trace);
    if (refined.applications == 0) return false;
    st.state = std::move(refined.state);
    return access();
  };

  for (std::size_t pc = 0; pc < prog.size(); ++pc) {
    const Instr& ins = prog[pc];
    const std::string before = trace ? show(envs, st) : std::string();
    switch (ins.kind) {
      case Instr::Kind::Assign:
        st.regs[ins.reg] = at_regs(ins.a, st.regs);
        emit(trace, "exec", std::to_string(pc) + ": assign " + std::to_string(ins.reg),
             before, render_expr(envs, st.regs[ins.reg], st.state.var_names));
        break;
      case Instr::Kind::Assume:
        st.state.pures.push_back(at_regs(ins.a, st.regs));
        emit(trace, "exec", std::to_string(pc) + ": assume",
             render_expr(envs, st.state.pures.back(), st.state.var_names));
        break;
      case Instr::Kind::Read: {
        const Expr addr = at_regs(ins.a, st.regs);
        std::optional<Expr> v;
        const bool ok = with_refinement([&] {
          const Facts facts = prover.summarize(envs, st.state.pures);
          v = mev.sread(envs, prover, facts, st.state.heap, addr);
          return v.has_value();
        });
        if (!ok) {
          emit(trace, "exec", std::to_string(pc) + ": read fault",
               render_expr(envs, addr, st.state.var_names), before);
          return MemFault{pc};
        }
        st.regs[ins.reg] = *v;
        emit(trace, "exec", std::to_string(pc) + ": read " + mev.name,
             render_expr(envs, addr, st.state.var_names),
             render_expr(envs, *v, st.state.var_names));
        break;
      }
      case Instr::Kind::Write: {
        const Expr addr = at_regs(ins.a, st.regs);
        const Expr val = at_regs(ins.b, st.regs);
        const bool ok = with_refinement([&] {
          const Facts facts = prover.summarize(envs, st.state.pures);
          auto h = mev.swrite(envs, prover, facts, st.state.heap, addr, val);
          if (h) st.state.heap = std::move(*h);
          return h.has_value();
        });
        if (!ok) {
          emit(trace, "exec", std::to_string(pc) + ": write fault",
               render_expr(envs, addr, st.state.var_names), before);
          return MemFault{pc};
        }
        emit(trace, "exec", std::to_string(pc) + ": write " + mev.name, before, show(envs, st));
        break;
      }
    }
  }
  return st;
}

ExecOutcome execute_block(const Envs& envs, const Block& block, const HintDatabase& db,
                          const MemEvaluator& mev, const Prover& prover, std::size_t fuel,
                          Trace* trace) {
  const std::size_t nregs = block.regs.size();
  SymState st;
  st.state.vars = block.regs;
  st.state.var_names = block.reg_names;
  st.state.var_names.resize(nregs);
  st.state.uvars = block.uvars;
  for (std::size_t k = 0; k < nregs; ++k) st.regs.push_back(Expr::var(k));

  SHeap pre = normalize(block.pre, nregs);
  st.state.vars.insert(st.state.vars.end(), pre.exists.begin(), pre.exists.end());
  st.state.var_names.insert(st.state.var_names.end(), pre.exists_names.begin(),
                            pre.exists_names.end());
  st.state.pures = std::move(pre.pures);
  pre.pures.clear();
  pre.exists.clear();
  pre.exists_names.clear();
  st.state.heap = std::move(pre);

  UnfoldResult fwd = unfold(envs, st.state, db, Direction::Forward, fuel, prover, trace);
  st.state = std::move(fwd.state);
  ExecOutcome out{sym_exec(envs, st, block.prog, mev, prover, db, fuel, trace), fwd.applications,
                  std::nullopt};
  if (std::holds_alternative<MemFault>(out.result)) out.fault_state = std::move(st);
  return out;
}

VerifyResult verify_block(const Envs& envs, const Block& block, const HintDatabase& db,
                          const MemEvaluator& mev, const Prover& prover, std::size_t fuel,
                          Trace* trace) {
  const std::size_t nregs = block.regs.size();
  ExecOutcome exec = execute_block(envs, block, db, mev, prover, fuel, trace);
  VerifyResult out;
  out.applications = exec.applications;
  if (auto* fault = std::get_if<MemFault>(&exec.result)) {
    out.residual.foralls = exec.fault_state->state.vars;
    out.residual.forall_names = exec.fault_state->state.var_names;
    out.residual.pre_uvars = block.uvars;
    out.residual.mem_fault = fault->at;
    return out;
  }
  const SymState& done = std::get<SymState>(exec.result);

  // Post: registers denote their final values; binders become fresh UVars.
  SHeap post = normalize(block.post, nregs);
  UnfoldState goal;
  goal.vars = done.state.vars;
  goal.var_names = done.state.var_names;
  goal.uvars = done.state.uvars;
  goal.pures = done.state.pures;
  const std::size_t first_fresh = goal.uvars.size();
  goal.uvars.insert(goal.uvars.end(), post.exists.begin(), post.exists.end());
  goal.heap = map_exprs(post, [&](const Expr& e) {
    return map_vars(e, [&](std::size_t n) {
      return n < nregs ? done.regs[n] : Expr::uvar(first_fresh + n - nregs);
    });
  });
  goal.heap.exists.clear();
  goal.heap.exists_names.clear();

  UnfoldResult bwd = unfold(envs, goal, db, Direction::Backward, fuel, prover, trace);
  out.applications += bwd.applications;

  CancelInput in;
  in.vars = done.state.vars;
  in.var_names = done.state.var_names;
  in.uvars = bwd.state.uvars;
  in.caller_uvars = block.uvars.size();
  in.uvar_scope = nregs;
  in.lhs = done.state.heap;
  in.lhs.pures = done.state.pures;
  in.rhs = std::move(bwd.state.heap);
  out.residual = cancel_heaps(envs, in, prover, trace);
  return out;
}

}  // namespace sepref
