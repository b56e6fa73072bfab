#include <doctest.h>

#include "sepref/model.hpp"
#include "testkit.hpp"

using namespace sepref;
using testkit::W;
using testkit::word;

namespace {

const Envs kEnvs = testkit::arith_envs();
const Interp kInterp = [] {
  Interp in = Interp::builtin();
  in.free_values["g0"] = Word{1};
  in.free_values["g1"] = Word{2};
  return in;
}();

Sexpr pt(Expr a, Expr v) { return Sexpr::pred(0, {std::move(a), std::move(v)}); }

}  // namespace

TEST_CASE("denote_expr") {
  Envs e;
  e.types = {{"nat", "nat_eq"}, {"bool", "bool_eq"}};
  const Tvar nat = Tvar::type(0);
  e.funcs = {{"plus", {nat, nat}, nat, "plus"},
             {"ltb", {nat, nat}, Tvar::type(1), "ltb"},
             {"x", {}, nat, "free"},
             {"y", {}, nat, "free"},
             {"z", {}, nat, "free"}};
  Interp in = Interp::builtin();
  in.free_values = {{"x", Nat{2}}, {"y", Nat{3}}, {"z", Nat{4}}};
  const Expr t = Expr::func(1, {Expr::func(0, {Expr::func(2), Expr::func(3)}), Expr::func(4)});
  CHECK(denote_expr(e, in, {}, {}, t, Tvar::type(1)) == Value{Bool{false}});
  in.free_values["z"] = Nat{6};
  CHECK(denote_expr(e, in, {}, {}, t, Tvar::type(1)) == Value{Bool{true}});

  CHECK(denote_expr(kEnvs, kInterp, {}, {}, word(4), W()) == Value{Word{4}});
  CHECK_FALSE(denote_expr(kEnvs, kInterp, {}, {}, Expr::var(0), W()));
  // Words wrap.
  CHECK(denote_expr(kEnvs, kInterp, {}, {}, Expr::func(1, {word(0), word(1)}), W()) ==
        Value{Word{0xffffffffu}});
}

TEST_CASE("denote_sexpr") {
  const ModelBounds b = ModelBounds::desk();
  CHECK(denote_sexpr(kEnvs, kInterp, {}, {}, Sexpr::emp(), {}, b));
  CHECK_FALSE(denote_sexpr(kEnvs, kInterp, {}, {}, Sexpr::emp(), {{1, 0}}, b));
  CHECK(denote_sexpr(kEnvs, kInterp, {}, {}, pt(Expr::func(3), Expr::func(4)), {{1, 2}}, b));
  CHECK_FALSE(denote_sexpr(kEnvs, kInterp, {}, {}, pt(Expr::func(3), Expr::func(4)), {{1, 3}}, b));
  const Sexpr twice = Sexpr::star(pt(Expr::func(3), word(0)), pt(Expr::func(3), word(1)));
  testkit::for_each_heap(b, [&](const Heap& h) {
    CHECK_FALSE(denote_sexpr(kEnvs, kInterp, {}, {}, twice, h, b));
  });
  // Pure facts hold on the empty heap only.
  const Sexpr pure = Sexpr::inj(Expr::equal(W(), word(1), word(1)));
  CHECK(denote_sexpr(kEnvs, kInterp, {}, {}, pure, {}, b));
  CHECK_FALSE(denote_sexpr(kEnvs, kInterp, {}, {}, pure, {{1, 1}}, b));
}

TEST_CASE("entails_oracle") {
  const ModelBounds b = ModelBounds::desk();
  const Interp in = Interp::builtin();
  CHECK(entails_oracle(kEnvs, in, {}, Sexpr::emp(), Sexpr::emp(), b));
  const Sexpr p_x = pt(Expr::func(3), Expr::func(4));
  CHECK(entails_oracle(kEnvs, in, {}, p_x, Sexpr::exists(W(), pt(Expr::func(3), Expr::var(0))), b));
  CHECK_FALSE(entails_oracle(kEnvs, in, {}, p_x, Sexpr::emp(), b));
  // A UVar stands for every value, not some value.
  const std::vector<Tvar> uv{W()};
  CHECK_FALSE(entails_oracle(kEnvs, in, uv, p_x, pt(Expr::func(3), Expr::uvar(0)), b));
}

TEST_CASE("oracle agrees with brute-force enumeration") {
  // Independent check of entails_oracle on random one-atom goals over the
  // globals: enumerate heaps and global values directly.
  testkit::Rng r(5);
  const ModelBounds b = ModelBounds::desk();
  for (int round = 0; round < 60; ++round) {
    const Sexpr lhs = Sexpr::star(pt(Expr::func(3 + r.below(2)), word(r.below(4))),
                                  r.chance(0.5) ? Sexpr::emp() : pt(word(1 + r.below(4)), Expr::func(3)));
    const Sexpr rhs = Sexpr::star(r.chance(0.5) ? Sexpr::emp() : pt(word(1 + r.below(4)), Expr::func(3)),
                                  pt(Expr::func(3 + r.below(2)), word(r.below(4))));
    bool expected = true;
    for (std::uint32_t g0 = 0; g0 < 4 && expected; ++g0)
      for (std::uint32_t g1 = 0; g1 < 4 && expected; ++g1) {
        Interp in = Interp::builtin();
        in.free_values = {{"g0", Word{g0}}, {"g1", Word{g1}}};
        testkit::for_each_heap(b, [&](const Heap& h) {
          if (denote_sexpr(kEnvs, in, {}, {}, lhs, h, b) && !denote_sexpr(kEnvs, in, {}, {}, rhs, h, b))
            expected = false;
        });
      }
    CHECK(entails_oracle(kEnvs, Interp::builtin(), {}, lhs, rhs, b) == expected);
  }
}

TEST_CASE("check_envs") {
  CHECK_FALSE(check_envs(kEnvs, Interp::builtin()));
  Envs bad = kEnvs;
  bad.funcs.push_back({"f", {W()}, W(), "no_such"});
  CHECK(check_envs(bad, Interp::builtin()));
  bad = kEnvs;
  bad.types.push_back({"t", "no_eq"});
  CHECK(check_envs(bad, Interp::builtin()));
  CHECK(free_globals(kEnvs) == std::vector<std::size_t>{3, 4});
}
