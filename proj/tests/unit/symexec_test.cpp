#include <doctest.h>

#include "sepref/driver.hpp"
#include "testkit.hpp"

using namespace sepref;
using testkit::W;
using testkit::word;

namespace {

const Envs kEnvs = testkit::arith_envs();

Expr plus(Expr a, Expr b) { return Expr::func(0, {std::move(a), std::move(b)}); }

SymState start(std::size_t nregs, SHeap heap) {
  SymState st;
  for (std::size_t k = 0; k < nregs; ++k) {
    st.state.vars.push_back(W());
    st.state.var_names.push_back("r" + std::to_string(k));
    st.regs.push_back(Expr::var(k));
  }
  st.state.heap = std::move(heap);
  return st;
}

SHeap cell(Expr a, Expr v) {
  SHeap h;
  h.add_atom(0, {std::move(a), std::move(v)});
  return h;
}

}  // namespace

TEST_CASE("ptsto evaluator") {
  const MemEvaluator m = ptsto_eval();
  const Prover prover = word_prover();
  const SHeap h = cell(Expr::var(0), Expr::var(1));
  const Facts none = prover.summarize(kEnvs, {});
  CHECK(m.sread(kEnvs, prover, none, h, Expr::var(0)) == Expr::var(1));
  auto w = m.swrite(kEnvs, prover, none, h, Expr::var(0), plus(Expr::var(1), word(1)));
  REQUIRE(w);
  CHECK(*w == cell(Expr::var(0), plus(Expr::var(1), word(1))));
  CHECK_FALSE(m.sread(kEnvs, prover, none, SHeap{}, Expr::var(0)));
  CHECK_FALSE(m.sread(kEnvs, prover, none, h, Expr::var(1)));
  // Provably equal addresses hit the cell.
  const std::vector<Expr> fact{Expr::equal(W(), Expr::var(2), plus(Expr::var(0), word(0)))};
  CHECK(m.sread(kEnvs, prover, prover.summarize(kEnvs, fact), h, Expr::var(2)) == Expr::var(1));
}

TEST_CASE("array evaluator") {
  const Envs envs = testkit::array_envs();
  const MemEvaluator m = array_eval();
  const Prover prover = make_prover("default").value();
  const Expr s = Expr::var(0), b = Expr::var(1), v = Expr::var(3);
  SHeap h;
  h.add_atom(0, {s, b});
  const Expr two_ok = Expr::func(2, {word(2), Expr::func(3, {s})});
  const Facts facts = prover.summarize(envs, std::vector<Expr>{two_ok});
  const Expr at2 = Expr::func(0, {b, Expr::func(1, {word(4), word(2)})});
  CHECK(m.sread(envs, prover, facts, h, at2) == Expr::func(4, {s, word(2)}));
  CHECK_FALSE(m.sread(envs, prover, prover.summarize(envs, {}), h, at2));

  auto w = m.swrite(envs, prover, facts, h, at2, v);
  REQUIRE(w);
  CHECK(m.sread(envs, prover, facts, *w, at2) == v);
}

TEST_CASE("compose_mem_evals") {
  const Envs envs = [] {
    Envs e = testkit::array_envs();
    e.preds.push_back({"ptsto", {W(), W()}, "ptsto"});
    return e;
  }();
  const MemEvaluator both = compose_mem_evals(ptsto_eval(), array_eval());
  const Prover prover = make_prover("default").value();
  SHeap h;
  h.add_atom(0, {Expr::var(0), Expr::var(1)});
  h.add_atom(1, {word(1), word(3)});
  const Facts facts = prover.summarize(envs, std::vector<Expr>{Expr::func(2, {word(0), Expr::func(3, {Expr::var(0)})})});
  CHECK(both.sread(envs, prover, facts, h, word(1)) == word(3));
  CHECK(both.sread(envs, prover, facts, h, Expr::var(1)) == Expr::func(4, {Expr::var(0), word(0)}));
  CHECK(make_mem_eval("ptsto+array"));
  CHECK_FALSE(make_mem_eval("ptsto+heap"));
}

TEST_CASE("memory evaluators agree with concrete heaps") {
  testkit::Rng r(77);
  const Prover prover = make_prover("default").value();
  const std::vector<Tvar> two{W(), W()};
  std::size_t hits = 0;
  for (int round = 0; round < 60; ++round) {
    const auto [h, addr] = testkit::random_ptsto_case(r);
    const auto c = testkit::check_mem_eval(kEnvs, ptsto_eval(), prover, h, two, addr, Expr::var(1),
                                           ModelBounds::desk());
    hits += c.read;
    CHECK(c.violations == 0);
  }
  CHECK(hits > 20);

  const Envs aenvs = testkit::array_envs();
  const std::vector<Tvar> avars{Tvar::type(1), W(), W(), W()};
  hits = 0;
  for (int round = 0; round < 40; ++round) {
    const auto [h, addr] = testkit::random_array_case(r);
    const auto c = testkit::check_mem_eval(aenvs, array_eval(), prover, h, avars, addr, Expr::var(3),
                                           testkit::array_bounds());
    hits += c.read;
    CHECK(c.violations == 0);
  }
  CHECK(hits > 10);
}

TEST_CASE("sym_exec on the increment-cell program") {
  const std::vector<Instr> prog{Instr::read(1, Expr::var(0)),
                                Instr::assign(1, plus(Expr::var(1), word(1))),
                                Instr::write(Expr::var(0), Expr::var(1))};
  const SymState st = start(2, cell(Expr::var(0), Expr::func(3)));
  auto out = sym_exec(kEnvs, st, prog, ptsto_eval(), word_prover(), empty_db(), 0);
  REQUIRE(std::holds_alternative<SymState>(out));
  const SymState& fin = std::get<SymState>(out);
  CHECK(fin.state.heap == cell(Expr::var(0), plus(Expr::func(3), word(1))));
  CHECK(fin.regs[1] == plus(Expr::func(3), word(1)));
  CHECK(fin.state.pures.empty());

  auto same = sym_exec(kEnvs, st, {}, ptsto_eval(), word_prover(), empty_db(), 0);
  REQUIRE(std::holds_alternative<SymState>(same));
  CHECK(std::get<SymState>(same).state.heap == st.state.heap);
  CHECK(std::get<SymState>(same).regs == st.regs);

  auto fault = sym_exec(kEnvs, start(2, SHeap{}), prog, ptsto_eval(), word_prover(), empty_db(), 0);
  REQUIRE(std::holds_alternative<MemFault>(fault));
  CHECK(std::get<MemFault>(fault).at == 0);
}

TEST_CASE("sym_exec records only assumed pures") {
  const Expr cond = Expr::equal(W(), Expr::var(1), word(2));
  const std::vector<Instr> prog{Instr::assume(cond), Instr::read(1, Expr::var(0))};
  SymState st = start(2, cell(Expr::var(0), word(3)));
  const Expr known = Expr::equal(W(), Expr::var(0), word(1));
  st.state.pures = {known};
  auto out = sym_exec(kEnvs, st, prog, ptsto_eval(), word_prover(), empty_db(), 0);
  REQUIRE(std::holds_alternative<SymState>(out));
  CHECK(std::get<SymState>(out).state.pures == std::vector<Expr>{known, cond});
}

TEST_CASE("sym_exec refines before an unjustified access") {
  const HintDatabase sll = load_hints("sll");
  const Envs envs = sll.instrument();
  const GoalFile g = parse_goal(
      "(var p w) (var l ls) (var r w)\n"
      "(pre [| p != 0 |] * sll(l, p))\n"
      "(prog (read r p + 4))\n"
      "(post EX x:w. EX t:ls. ptsto(p, x) * ptsto(p + 4, r) * sll(t, r))",
      envs);
  Trace trace;
  const CheckReport rep = check_program(g, sll, sll.prover(), ptsto_eval(), 5, &trace);
  CHECK(rep.proved);
  CHECK(rep.unfold_count >= 1);
  bool refined = false;
  for (const TraceEvent& e : trace) refined = refined || e.phase == "unfold";
  CHECK(refined);
}

TEST_CASE("verify_block") {
  const GoalFile incr = parse_goal(
      "(type w word_eq) (func + (w w) w plus) (func x () w) (pred ptsto (w w) ptsto)\n"
      "(var p w) (var r w)\n"
      "(pre ptsto(p, x)) (prog (read r p) (assign r r + 1) (write p, r)) (post ptsto(p, x + 1))");
  const VerifyResult ok = verify_block(incr.envs, incr.block(), empty_db(), ptsto_eval(), word_prover(), 0);
  CHECK(residual_trivial(incr.envs, ok.residual, word_prover()));

  Block wrong = incr.block();
  wrong.post = parse_sexpr(incr.envs, "ptsto(p, x + 2)", Scope{{"p", "r"}, {W(), W()}, {}, {}});
  const VerifyResult bad = verify_block(incr.envs, wrong, empty_db(), ptsto_eval(), word_prover(), 0);
  CHECK_FALSE(residual_trivial(incr.envs, bad.residual, word_prover()));

  Block idle = incr.block();
  idle.prog.clear();
  idle.post = idle.pre;
  CHECK(residual_trivial(incr.envs, verify_block(incr.envs, idle, empty_db(), ptsto_eval(), word_prover(), 0).residual,
                         word_prover()));

  Block lost = incr.block();
  lost.pre = Sexpr::emp();
  const VerifyResult fault = verify_block(incr.envs, lost, empty_db(), ptsto_eval(), word_prover(), 0);
  CHECK(fault.residual.mem_fault == std::optional<std::size_t>{0});
}

TEST_CASE("symbolic execution over-approximates concrete runs") {
  // Registers p q r; pre p |-> q * p + 1 |-> 2. Random straight-line
  // programs run concretely from every satisfying state must land in a model
  // of the symbolic post with matching registers.
  const Expr p = Expr::var(0), q = Expr::var(1), r = Expr::var(2);
  const std::vector<Instr> menu{
      Instr::read(2, p), Instr::read(2, plus(p, word(1))), Instr::read(1, p),
      Instr::assign(2, plus(r, word(1))), Instr::assign(1, plus(p, word(1))),
      Instr::write(p, r), Instr::write(plus(p, word(1)), q),
      Instr::assume(Expr::equal(W(), r, q))};
  SHeap pre = cell(p, q);
  pre.add_atom(0, {plus(p, word(1)), word(2)});
  const Interp in = Interp::builtin();
  const ModelBounds bounds = ModelBounds::desk();
  testkit::Rng rng(9);
  std::size_t runs = 0;
  for (int round = 0; round < 40; ++round) {
    std::vector<Instr> prog;
    for (std::size_t k = 1 + rng.below(4); k-- > 0;) prog.push_back(rng.pick(menu));
    auto out = sym_exec(kEnvs, start(3, pre), prog, ptsto_eval(), word_prover(), empty_db(), 0);
    if (!std::holds_alternative<SymState>(out)) continue;
    const SymState& fin = std::get<SymState>(out);
    SHeap post = fin.state.heap;
    post.pures.insert(post.pures.end(), fin.state.pures.begin(), fin.state.pures.end());
    const Sexpr post_s = denormalize(post);
    testkit::for_each_assignment(kEnvs, bounds, {W(), W(), W()}, [&](const Assignment& init) {
      testkit::for_each_heap(bounds, [&](const Heap& h0) {
        if (!denote_sexpr(kEnvs, in, {}, init, denormalize(pre), h0, bounds)) return;
        std::vector<std::uint32_t> regs;
        for (const auto& b : init) regs.push_back(std::get<Word>(b.second).v);
        Heap h = h0;
        auto eval = [&](const Expr& e) {
          Assignment cur;
          for (std::uint32_t v : regs) cur.emplace_back(W(), Word{v});
          return denote_expr(kEnvs, in, {}, cur, e, e.is(Expr::Kind::Equal) ? Tvar::prop() : W());
        };
        for (const Instr& ins : prog) {
          switch (ins.kind) {
            case Instr::Kind::Assign: regs[ins.reg] = std::get<Word>(*eval(ins.a)).v; break;
            case Instr::Kind::Read: regs[ins.reg] = h.at(std::get<Word>(*eval(ins.a)).v); break;
            case Instr::Kind::Write: h.at(std::get<Word>(*eval(ins.a)).v) = std::get<Word>(*eval(ins.b)).v; break;
            case Instr::Kind::Assume:
              if (!std::get<PropV>(*eval(ins.a)).v) return;
              break;
          }
        }
        ++runs;
        CHECK(denote_sexpr(kEnvs, in, {}, init, post_s, h, bounds));
        for (std::size_t k = 0; k < regs.size(); ++k)
          CHECK(denote_expr(kEnvs, in, {}, init, fin.regs[k], W()) == Value{Word{regs[k]}});
      });
    });
  }
  CHECK(runs > 100);
}
