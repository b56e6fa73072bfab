#include <doctest.h>

#include "sepref/term.hpp"
#include "testkit.hpp"

using namespace sepref;
using testkit::W;
using testkit::word;

namespace {

// nat, bool; plus : nat nat -> nat, ltb : nat nat -> bool, x y z : nat.
Envs nat_envs() {
  Envs e;
  const Tvar nat = Tvar::type(0), b = Tvar::type(1);
  e.types = {{"nat", "nat_eq"}, {"bool", "bool_eq"}};
  e.funcs = {{"plus", {nat, nat}, nat, "plus"},
             {"ltb", {nat, nat}, b, "ltb"},
             {"x", {}, nat, "free"},
             {"y", {}, nat, "free"},
             {"z", {}, nat, "free"}};
  return e;
}

}  // namespace

TEST_CASE("typecheck_expr") {
  const Envs e = nat_envs();
  const Expr t = Expr::func(1, {Expr::func(0, {Expr::func(2), Expr::func(3)}), Expr::func(4)});
  CHECK(typecheck_expr(e, {}, {}, t) == Tvar::type(1));

  const std::vector<Tvar> vars{Tvar::type(0)};
  CHECK(typecheck_expr(e, vars, {}, Expr::var(0)) == Tvar::type(0));
  CHECK_FALSE(typecheck_expr(Envs{}, {}, {}, Expr::func(0)));
  CHECK_FALSE(typecheck_expr(e, {}, {}, Expr::var(0)));
  CHECK_FALSE(typecheck_expr(e, {}, {}, Expr::func(0, {Expr::func(2)})));
  CHECK_FALSE(typecheck_expr(e, {}, {}, Expr::func(0, {Expr::func(2), t})));
  CHECK(typecheck_expr(e, {}, {}, Expr::equal(Tvar::type(0), Expr::func(2), Expr::func(3))) ==
        Tvar::prop());
}

TEST_CASE("typecheck_sexpr") {
  const Envs e = testkit::arith_envs();
  CHECK(typecheck_sexpr(e, {}, {}, Sexpr::emp()));
  const Sexpr ex = Sexpr::exists(W(), Sexpr::pred(0, {Expr::func(3), Expr::var(0)}));
  CHECK(typecheck_sexpr(e, {}, {}, ex));
  const std::vector<Tvar> vars{W()};
  CHECK_FALSE(typecheck_sexpr(e, vars, {}, Sexpr::inj(Expr::var(0))));
  // The binder is only in scope under the Exists.
  CHECK_FALSE(typecheck_sexpr(e, {}, {}, Sexpr::star(ex, Sexpr::pred(0, {Expr::var(0), word(1)}))));
  CHECK_FALSE(typecheck_sexpr(e, {}, {}, Sexpr::pred(0, {word(1)})));
}

TEST_CASE("expr_syntactic_eq") {
  const Envs e = testkit::arith_envs();
  CHECK(expr_syntactic_eq(e, Expr::var(3), Expr::var(3)));
  CHECK(expr_syntactic_eq(e, word(4), word(4)));
  CHECK_FALSE(expr_syntactic_eq(e, word(4), word(5)));
  CHECK_FALSE(expr_syntactic_eq(e, Expr::func(0, {Expr::var(0), word(1)}),
                                Expr::func(0, {Expr::uvar(0), word(1)})));
}

TEST_CASE("lift_expr") {
  CHECK(lift_expr(Expr::var(0), 0, 2) == Expr::var(2));
  CHECK(lift_expr(Expr::var(1), 2, 5) == Expr::var(1));
  CHECK(lift_expr(Expr::func(0, {Expr::var(0), Expr::var(3)}), 1, 1) ==
        Expr::func(0, {Expr::var(0), Expr::var(4)}));
  CHECK(lift_uvars(Expr::func(0, {Expr::uvar(0), Expr::var(0)}), 0, 3) ==
        Expr::func(0, {Expr::uvar(3), Expr::var(0)}));
}

TEST_CASE("lift_expr preserves denotation in an extended context") {
  // Inserting `by` fresh variables at `skip` and lifting the term must not
  // change its value, whatever the inserted variables hold.
  const Envs e = testkit::arith_envs();
  testkit::Rng r(11);
  for (int round = 0; round < 300; ++round) {
    const Interp in = testkit::interp_with_globals(r);
    const Expr t = testkit::random_word_term(r, 3, 3, 0);
    const std::size_t skip = r.below(4), by = 1 + r.below(2);
    const Assignment vals = testkit::random_words(r, 3);
    Assignment wide(vals.begin(), vals.begin() + std::min<std::size_t>(skip, 3));
    const Assignment extra = testkit::random_words(r, by);
    wide.insert(wide.end(), extra.begin(), extra.end());
    if (skip < 3) wide.insert(wide.end(), vals.begin() + skip, vals.end());
    const auto before = denote_expr(e, in, {}, vals, t, W());
    const auto after = denote_expr(e, in, {}, wide, lift_expr(t, skip, by), W());
    REQUIRE(before);
    CHECK(before == after);
  }
}

TEST_CASE("open_exists") {
  const Sexpr body = Sexpr::pred(0, {Expr::var(0), Expr::var(1)});
  auto o = open_exists(Sexpr::emp());
  CHECK(o.binders.empty());
  CHECK(o.body == Sexpr::emp());

  o = open_exists(Sexpr::exists(W(), Sexpr::exists(Tvar::prop(), body)));
  CHECK(o.binders == std::vector<Tvar>{W(), Tvar::prop()});
  CHECK(o.body == body);

  const Sexpr inner = Sexpr::star(Sexpr::exists(W(), body), Sexpr::emp());
  o = open_exists(inner);
  CHECK(o.binders.empty());
  CHECK(o.body == inner);
}

TEST_CASE("expr_compare puts UVars last") {
  CHECK(expr_compare(word(9), Expr::var(0)) < 0);
  CHECK(expr_compare(Expr::var(5), Expr::func(0)) < 0);
  CHECK(expr_compare(Expr::func(7, {Expr::uvar(0)}), Expr::uvar(0)) < 0);
  CHECK(expr_compare(Expr::uvar(1), Expr::uvar(1)) == 0);
}
