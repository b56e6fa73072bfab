#include <doctest.h>

#include "sepref/driver.hpp"
#include "testkit.hpp"

using namespace sepref;
using testkit::W;
using testkit::word;

namespace {

const TypeDecl T0{"t0", "word_eq"}, T1{"t1", "nat_eq"}, T2{"t2", "bool_eq"};
const TypeDecl WD{"w", "word_eq"}, LW{"lw", "seq_eq"};

}  // namespace

TEST_CASE("apply_constraint") {
  const EnvConstraint<TypeDecl> c1{std::nullopt, LW};
  CHECK(apply_constraint(c1, {T0, T1, T2}, unit_type()) == std::vector<TypeDecl>{T0, LW, T2});
  CHECK(apply_constraint(EnvConstraint<TypeDecl>{}, {T0, T1}, unit_type()) ==
        std::vector<TypeDecl>{T0, T1});
  CHECK(apply_constraint(EnvConstraint<TypeDecl>{WD}, {}, unit_type()) == std::vector<TypeDecl>{WD});
  // Unconstrained positions past the environment take the unit entry.
  CHECK(apply_constraint(c1, {}, unit_type()) == std::vector<TypeDecl>{unit_type(), LW});
  CHECK(satisfies(c1, apply_constraint(c1, {T0}, unit_type())));
}

TEST_CASE("compatible and merge") {
  const EnvConstraint<TypeDecl> c1{std::nullopt, LW}, c2{WD};
  CHECK(compatible(c1, c2));
  CHECK(merge(c1, c2) == EnvConstraint<TypeDecl>{WD, LW});
  CHECK(merge(c1, c1) == c1);
  CHECK_FALSE(compatible(c2, EnvConstraint<TypeDecl>{LW}));
  CHECK_FALSE(merge(c2, EnvConstraint<TypeDecl>{LW}));
}

TEST_CASE("compose_db") {
  const HintDatabase sll = load_hints("sll");
  const HintDatabase bst = load_hints("bst");
  auto same = compose_db(sll, empty_db());
  REQUIRE(same);
  CHECK(same->instrument() == sll.instrument());
  CHECK(same->lemmas.size() == sll.lemmas.size());

  auto both = compose_db(sll, bst);
  REQUIRE(both);
  CHECK(both->lemmas.size() == 8);
  const Envs envs = both->instrument();
  CHECK(envs.find_pred("sll"));
  CHECK(envs.find_pred("bst"));
  CHECK(both->prover().name().find("order") != std::string::npos);

  HintDatabase clash = empty_db();
  clash.preds = {PredSig{"other", {W(), W()}, "ptsto"}};
  CHECK_FALSE(compose_db(sll, clash));
}

TEST_CASE("composed databases prove a goal mixing both") {
  const HintDatabase db = load_hint_list({"sll", "bst"});
  const GoalFile g = parse_goal(
      "(var p w) (var q w) (var x w)\n"
      "(entail [| p != 0 |] * ptsto(p, x) * ptsto(p + 4, 0) * [| q = 0 |]\n"
      "  ===> sll(cons(x, nil), p) * bst(nil, q))",
      db.instrument());
  const CheckReport rep = check_entailment(g, db, db.prover(), 10);
  CHECK(rep.proved);
  // Either database alone lacks a needed fold.
  for (const char* one : {"sll", "bst"}) {
    const HintDatabase part = load_hints(one);
    const GoalFile g1 = parse_goal(render_goal(g));
    CHECK_FALSE(check_entailment(g1, part, part.prover(), 10).proved);
  }
}

TEST_CASE("validate_lemma") {
  const HintDatabase sll = load_hints("sll");
  const Envs envs = sll.instrument();
  const Interp in = Interp::builtin();
  const ModelBounds b = *sll.bounds;
  CHECK(validate_lemma(envs, in, sll.lemmas[0], b));

  HintLemma trivial;
  trivial.name = "emp";
  CHECK(validate_lemma(envs, in, trivial, b));

  HintLemma bad;
  bad.name = "bad";
  bad.binders = {W()};
  bad.rhs = Sexpr::pred(0, {Expr::var(0), word(0)});
  CHECK_FALSE(validate_lemma(envs, in, bad, b));

  // Dropping the side condition of the forward nil lemma breaks it.
  HintLemma loose = sll.lemmas[2];
  loose.pures.clear();
  CHECK_FALSE(validate_lemma(envs, in, loose, b));
}

TEST_CASE("check_lemma rejects ill-formed lemmas") {
  const HintDatabase sll = load_hints("sll");
  const Envs envs = sll.instrument();
  for (const HintLemma& l : sll.lemmas) CHECK_FALSE(check_lemma(envs, l));
  HintLemma two = sll.lemmas[1];
  two.rhs = Sexpr::star(two.rhs, two.rhs);
  CHECK(check_lemma(envs, two));
}

TEST_CASE("forward unfold of a nonempty list") {
  const HintDatabase sll = load_hints("sll");
  const Envs envs = sll.instrument();
  UnfoldState st;
  st.vars = {Tvar::type(1), W()};
  st.var_names = {"l", "p"};
  const Scope scope{st.var_names, st.vars, {}, {}};
  st.pures = {parse_expr(envs, "p != 0", scope)};
  st.heap = normalize(parse_sexpr(envs, "sll(l, p)", scope), 2);

  const UnfoldResult none = unfold(envs, st, sll, Direction::Forward, 0, sll.prover());
  CHECK(none.applications == 0);
  CHECK(none.state.heap == st.heap);

  Trace trace;
  const UnfoldResult r = unfold(envs, st, sll, Direction::Forward, 1, sll.prover(), &trace);
  CHECK(r.applications == 1);
  REQUIRE(r.state.vars.size() == 5);
  CHECK(render_heap(envs, r.state.heap, r.state.var_names) ==
        "ptsto(p, x) * ptsto(p + 4, p2) * sll(l2, p2)");
  REQUIRE(r.state.pures.size() == 2);
  CHECK(render_expr(envs, r.state.pures[1], r.state.var_names) == "l = cons(x, l2)");
  REQUIRE_FALSE(trace.empty());
  for (const TraceEvent& e : trace) CHECK(e.phase == "unfold");

  // Without the non-null fact neither forward lemma applies.
  st.pures.clear();
  CHECK(unfold(envs, st, sll, Direction::Forward, 5, sll.prover()).applications == 0);
}

TEST_CASE("backward unfold folds n cells with n+1 applications") {
  const HintDatabase sll = load_hints("sll");
  for (std::size_t n : {0, 1, 3, 6}) {
    const GoalFile g = gen_sll_goal(n);
    const CheckReport rep = check_entailment(g, sll, sll.prover(), 2 * n + 16);
    CHECK(rep.unfold_count == n + 1);
    CHECK(rep.proved);
    CHECK(rep.residual.rhs_rem.no_atoms());
  }
}
