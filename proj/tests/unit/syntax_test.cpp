#include <doctest.h>

#include "sepref/driver.hpp"
#include "testkit.hpp"

using namespace sepref;
using testkit::W;
using testkit::word;

namespace {

Envs p_envs() {
  Envs e;
  e.types = {{"w", "word_eq"}};
  e.funcs = {{"+", {W(), W()}, W(), "plus"}, {"p", {}, W(), "free"}};
  e.preds = {{"ptsto", {W(), W()}, "ptsto"}};
  return e;
}

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("the two-cell example renders with a fresh binder name") {
  const Envs e = p_envs();
  const Expr p = Expr::func(1);
  const Sexpr s = Sexpr::exists(
      W(), Sexpr::star(Sexpr::pred(0, {p, Expr::uvar(0)}),
                       Sexpr::pred(0, {Expr::func(0, {p, word(4)}), Expr::var(0)})));
  CHECK(render_sexpr(e, s) == "EX v:w. ptsto(p, ?0) * ptsto(p + 4, v)");
  const Scope scope{{}, {}, {}, {W()}};
  CHECK(parse_sexpr(e, "EX v:w. ptsto(p, ?0) * ptsto(p + 4, v)", scope) == s);
  // A binder named like a global is renamed on display.
  CHECK(render_sexpr(e, Sexpr::exists(W(), Sexpr::pred(0, {Expr::var(0), p}), "p")) ==
        "EX p1:w. ptsto(p1, p)");
}

TEST_CASE("expression syntax") {
  const Envs e = p_envs();
  const Scope scope{{"a", "b"}, {W(), W()}, {"u"}, {W()}};
  const Expr sum = parse_expr(e, "a + b + 1", scope);
  CHECK(sum == Expr::func(0, {Expr::func(0, {Expr::var(0), Expr::var(1)}), word(1)}));
  CHECK(render_expr(e, sum, scope.var_names) == "a + b + 1");
  const Expr right = parse_expr(e, "a + (b + 1)", scope);
  CHECK(render_expr(e, right, scope.var_names) == "a + (b + 1)");
  CHECK(parse_expr(e, "?u = p", scope) == Expr::equal(W(), Expr::uvar(0), Expr::func(1)));
  CHECK(parse_expr(e, "?0", scope) == Expr::uvar(0));
}

TEST_CASE("assertions render in normal form") {
  const Envs e = p_envs();
  const Scope scope{{"a"}, {W()}, {}, {}};
  for (const char* text : {"emp", "[| a = 1 |] * ptsto(a, 2)", "(EX x:w. ptsto(a, x)) * ptsto(p, a)",
                           "EX x:w. EX y:w. ptsto(x, y) * [| y = a |]"}) {
    const Sexpr s = parse_sexpr(e, text, scope);
    CHECK(render_sexpr(e, s, scope.var_names) == text);
  }
}

TEST_CASE("parse errors carry positions") {
  const Envs e = p_envs();
  const std::string arity = error_of([&] { parse_expr(e, "p(1)"); });
  CHECK(arity.find("declared as (func p () w") != std::string::npos);
  CHECK(arity.rfind("1:", 0) == 0);

  const std::string pred = error_of([&] { parse_sexpr(e, "ptsto(1)"); });
  CHECK(pred.find("(pred ptsto (w w)") != std::string::npos);

  const std::string goal = error_of([&] { parse_goal("(type w word_eq)\n(var x w)\n(entail emp ===> ptsto(x, x))"); });
  CHECK(goal.rfind("3:", 0) == 0);

  CHECK(error_of([&] { parse_expr(e, "a"); }).find("'a'") != std::string::npos);
  CHECK(error_of([&] { parse_goal("(type w word_eq) (type w seq_eq)"); }) != "");
  CHECK(error_of([&] { parse_goal("(type w nope_eq)"); }) != "");
  CHECK(error_of([&] { parse_sexpr(e, "ptsto(p, 1) *"); }) != "");
}

TEST_CASE("goal files round trip") {
  testkit::Rng r(99);
  for (int round = 0; round < 200; ++round) {
    const GoalFile g = testkit::random_goal(r);
    const std::string text = render_goal(g);
    const GoalFile back = parse_goal(text);
    CHECK(back.vars == g.vars);
    CHECK(back.uvars == g.uvars);
    CHECK(back.lhs == g.lhs);
    CHECK(back.rhs == g.rhs);
    CHECK(render_goal(back) == text);
  }
}

TEST_CASE("program goals round trip") {
  const std::string text =
      "(type w word_eq)\n(func + (w w) w plus)\n(func x () w)\n(pred ptsto (w w) ptsto)\n"
      "(var p w)\n(var r w)\n(pre ptsto(p, x))\n"
      "(prog\n  (read r p)\n  (assign r r + 1)\n  (write p, r))\n(post ptsto(p, x + 1))\n";
  const GoalFile g = parse_goal(text);
  CHECK(g.is_program);
  REQUIRE(g.prog.size() == 3);
  CHECK(g.prog[2].kind == Instr::Kind::Write);
  CHECK(render_goal(parse_goal(render_goal(g))) == render_goal(g));
}

TEST_CASE("hint databases round trip") {
  for (const char* name : {"sll", "bst"}) {
    const HintDatabase db = load_hints(name);
    const std::string text = render_hints(db);
    const HintDatabase back = parse_hints(text);
    CHECK(back.instrument() == db.instrument());
    CHECK(back.lemmas.size() == db.lemmas.size());
    CHECK(render_hints(back) == text);
  }
}

TEST_CASE("residual goals can be checked again") {
  const GoalFile g = parse_goal(
      "(type w word_eq) (func q () w) (func r () w) (pred ptsto (w w) ptsto) (uvar a w)\n"
      "(entail ptsto(q, 1) ===> ptsto(q, ?a) * EX z:w. ptsto(r, z))");
  const Prover prover = make_prover("default").value();
  const CheckReport rep = check_entailment(g, empty_db(), prover, 0);
  CHECK_FALSE(rep.proved);
  const GoalFile again = parse_goal(render_goal(residual_goal(g.envs, rep.residual, g.uvar_names)));
  CHECK(again.envs == g.envs);
  CHECK(render_sexpr(again.envs, again.rhs) == "EX v:w. [| ?0 = 1 |] * ptsto(r, v)");
}

TEST_CASE("bounds syntax") {
  const HintDatabase sll = load_hints("sll");
  const Envs e = sll.instrument();
  const ModelBounds b = parse_bounds(e, "addr=16 step=4 heap=0,1 w=0,4 ls=[],[1,4]");
  CHECK(b.max_address == 16);
  CHECK(b.addresses() == std::vector<std::uint32_t>{4, 8, 12, 16});
  CHECK(b.samples(e, Tvar::type(1)).size() == 2);
  CHECK(parse_bounds(e, render_bounds(e, b)).heap_values == b.heap_values);
  CHECK(error_of([&] { parse_bounds(e, "addr=x"); }) != "");
}
