#include <doctest.h>

#include "sepref/driver.hpp"
#include "testkit.hpp"

using namespace sepref;
using testkit::W;
using testkit::word;

namespace {

// w; funcs p q r (free), +; pred ptsto.
Envs fig_envs() {
  Envs e;
  e.types = {{"w", "word_eq"}};
  e.funcs = {{"p", {}, W(), "free"}, {"q", {}, W(), "free"}, {"r", {}, W(), "free"},
             {"+", {W(), W()}, W(), "plus"}};
  e.preds = {{"ptsto", {W(), W()}, "ptsto"}};
  return e;
}

const Envs kEnvs = fig_envs();
const Expr P = Expr::func(0), Q = Expr::func(1), R = Expr::func(2);

Sexpr pt(Expr a, Expr v) { return Sexpr::pred(0, {std::move(a), std::move(v)}); }

// p |-> q * EX x. q |-> x  ===>  p |-> ?a * EX y. ?a |-> y * EX z. r |-> z
Residual fig_residual(Trace* trace = nullptr) {
  const Sexpr lhs = Sexpr::star(pt(P, Q), Sexpr::exists(W(), pt(Q, Expr::var(0)), "x"));
  const Sexpr rhs = Sexpr::star(
      pt(P, Expr::uvar(0)),
      Sexpr::exists(W(), Sexpr::star(pt(Expr::uvar(0), Expr::var(0)),
                                     Sexpr::exists(W(), pt(R, Expr::var(1)), "z")),
                    "y"));
  return cancel(kEnvs, lhs, rhs, make_prover("default").value(), {W()}, trace);
}

}  // namespace

TEST_CASE("atom_order") {
  const Atom p_a{0, {P, Expr::uvar(0)}}, b_c{0, {Expr::uvar(1), Expr::uvar(2)}};
  CHECK(atom_order(p_a, b_c) < 0);
  CHECK(atom_order(p_a, p_a) == 0);
  testkit::Rng r(4);
  std::vector<Atom> atoms;
  for (int i = 0; i < 40; ++i)
    atoms.push_back({r.below(2), {testkit::random_word_term(r, 1, 2, 2), testkit::random_word_term(r, 1, 2, 2)}});
  for (const Atom& a : atoms)
    for (const Atom& b : atoms) {
      CHECK((atom_order(a, b) < 0) == (atom_order(b, a) > 0));
      for (const Atom& c : atoms)
        if (atom_order(a, b) < 0 && atom_order(b, c) < 0) CHECK(atom_order(a, c) < 0);
    }
}

TEST_CASE("cancellation leaves the unmatched conclusion cell") {
  Trace trace;
  const Residual r = fig_residual(&trace);
  REQUIRE(r.uvar_equations.size() == 1);
  CHECK(r.uvar_equations[0].first == 0);
  CHECK(r.uvar_equations[0].second == Q);
  CHECK(r.foralls == std::vector<Tvar>{W()});
  CHECK(r.exists_left == std::vector<Tvar>{W()});
  CHECK(r.lhs_rem.no_atoms());
  CHECK(r.lhs_rem.pures.empty());
  const std::vector<Atom> rest = r.rhs_rem.atoms();
  REQUIRE(rest.size() == 1);
  CHECK(rest[0] == Atom{0, {R, Expr::uvar(1)}});
  CHECK(r.rhs_rem.pures.empty());
  CHECK_FALSE(residual_trivial(kEnvs, r, make_prover("default").value()));
  CHECK(trace.size() == 2);
}

TEST_CASE("cancel is deterministic") {
  CHECK(fig_residual() == fig_residual());
}

TEST_CASE("trivial cancellations") {
  const Prover prover = make_prover("default").value();
  const Residual empty = cancel(kEnvs, Sexpr::emp(), Sexpr::emp(), prover, {});
  CHECK(residual_trivial(kEnvs, empty, prover));

  const Sexpr l = Sexpr::star(pt(P, word(1)), pt(Q, word(2)));
  const Sexpr r = Sexpr::star(pt(Q, word(2)), pt(P, word(1)));
  const Residual swapped = cancel(kEnvs, l, r, prover, {});
  CHECK(residual_trivial(kEnvs, swapped, prover));
  CHECK(entails_oracle(kEnvs, Interp::builtin(), {}, l, r, ModelBounds::desk()));

  const Residual pure = cancel(kEnvs, Sexpr::emp(), Sexpr::inj(Expr::equal(W(), P, P)),
                               reflexivity_prover(), {});
  CHECK(residual_trivial(kEnvs, pure, reflexivity_prover()));

  const Residual open = cancel(kEnvs, Sexpr::emp(), pt(R, Expr::uvar(0)), prover, {W()});
  CHECK_FALSE(residual_trivial(kEnvs, open, prover));
}

TEST_CASE("unifiable partners are preferred") {
  // p |-> ?a should pair with p |-> v, not with the later ?b |-> ?c.
  const Sexpr lhs = Sexpr::star(pt(P, word(1)), pt(Q, word(2)));
  const Sexpr rhs = Sexpr::star(pt(Expr::uvar(1), Expr::uvar(2)), pt(P, Expr::uvar(0)));
  const Prover prover = make_prover("default").value();
  const Residual r = cancel(kEnvs, lhs, rhs, prover, {W(), W(), W()});
  CHECK(residual_trivial(kEnvs, r, prover));
  REQUIRE(r.uvar_equations.size() == 3);
  CHECK(r.uvar_equations[0] == std::pair<std::size_t, Expr>{0, word(1)});
  CHECK(r.uvar_equations[1] == std::pair<std::size_t, Expr>{1, Q});
}

TEST_CASE("prover-equal arguments cancel") {
  // x = y + 4 lets ptsto(x, 0) discharge ptsto(y + 4, 0).
  CancelInput in;
  in.vars = {W(), W()};
  in.var_names = {"x", "y"};
  in.lhs = normalize(Sexpr::star(Sexpr::inj(Expr::equal(W(), Expr::var(0), Expr::func(3, {Expr::var(1), word(4)}))),
                                 pt(Expr::var(0), word(0))),
                     2);
  in.rhs = normalize(pt(Expr::func(3, {Expr::var(1), word(4)}), word(0)), 2);
  const Prover prover = word_prover();
  CHECK(residual_trivial(kEnvs, cancel_heaps(kEnvs, in, prover), prover));
  CHECK_FALSE(residual_trivial(kEnvs, cancel_heaps(kEnvs, in, reflexivity_prover()), prover));
}

TEST_CASE("caller UVars never capture hypothesis existentials") {
  // EX x. p |-> x  ===>  p |-> ?a  must not bind ?a to x.
  const Prover prover = make_prover("default").value();
  const Residual r = cancel(kEnvs, Sexpr::exists(W(), pt(P, Expr::var(0))), pt(P, Expr::uvar(0)),
                            prover, {W()});
  CHECK_FALSE(residual_trivial(kEnvs, r, prover));
  CHECK(r.uvar_equations.empty());
}

TEST_CASE("proved random goals hold in the model") {
  testkit::Rng rng(1234);
  const Prover prover = make_prover("default").value();
  const HintDatabase db = empty_db();
  int proved = 0;
  for (int round = 0; round < 400 && proved < 60; ++round) {
    const GoalFile g = testkit::random_goal(rng);
    REQUIRE(typecheck_sexpr(g.envs, g.vars, g.uvars, g.lhs));
    REQUIRE(typecheck_sexpr(g.envs, g.vars, g.uvars, g.rhs));
    const CheckReport rep = check_entailment(g, db, prover, 4);
    if (!rep.proved) continue;
    ++proved;
    const auto cex = oracle_counterexample(g.envs, Interp::builtin(), claim_query(g, rep.residual),
                                           ModelBounds::desk());
    CHECK_MESSAGE(!cex, render_goal(g));
  }
  CHECK(proved >= 60);
}
