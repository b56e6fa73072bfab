#include "sepref/term.hpp"

#include <cassert>

namespace sepref {

// ---------------------------------------------------------------------------
// Envs

namespace {

template <class T>
std::optional<std::size_t> find_named(const std::vector<T>& xs, std::string_view name) {
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (xs[i].name == name) return i;
  return std::nullopt;
}

template <class T>
std::optional<std::size_t> find_interp(const std::vector<T>& xs, std::string_view interp) {
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (xs[i].interp == interp) return i;
  return std::nullopt;
}

}  // namespace

std::optional<std::size_t> Envs::find_func(std::string_view name) const {
  return find_named(funcs, name);
}
std::optional<std::size_t> Envs::find_pred(std::string_view name) const {
  return find_named(preds, name);
}
std::optional<std::size_t> Envs::find_type(std::string_view name) const {
  return find_named(types, name);
}
std::optional<std::size_t> Envs::func_by_interp(std::string_view interp) const {
  return find_interp(funcs, interp);
}
std::optional<std::size_t> Envs::pred_by_interp(std::string_view interp) const {
  return find_interp(preds, interp);
}

std::optional<Carrier> Envs::carrier(const Tvar& t) const {
  if (t.is_prop()) return Carrier::Prop;
  if (t.index() >= types.size()) return std::nullopt;
  const EqTester* tester = find_eq_test(types[t.index()].eq_test);
  if (!tester) return std::nullopt;
  return tester->carrier;
}

// ---------------------------------------------------------------------------
// Expr

Expr Expr::constant(Tvar t, Value v) {
  return Expr(std::make_shared<const Node>(Node{Kind::Const, 0, t, std::move(v), {}}));
}
Expr Expr::var(std::size_t n) {
  return Expr(std::make_shared<const Node>(Node{Kind::Var, n, {}, {}, {}}));
}
Expr Expr::uvar(std::size_t n) {
  return Expr(std::make_shared<const Node>(Node{Kind::UVar, n, {}, {}, {}}));
}
Expr Expr::func(std::size_t f, std::vector<Expr> args) {
  return Expr(std::make_shared<const Node>(Node{Kind::Func, f, {}, {}, std::move(args)}));
}
Expr Expr::equal(Tvar t, Expr lhs, Expr rhs) {
  std::vector<Expr> sides;
  sides.reserve(2);
  sides.push_back(std::move(lhs));
  sides.push_back(std::move(rhs));
  return Expr(std::make_shared<const Node>(Node{Kind::Equal, 0, t, {}, std::move(sides)}));
}

Expr::Kind Expr::kind() const { return node_->kind; }
std::size_t Expr::index() const { return node_->index; }
const Tvar& Expr::type() const { return node_->type; }
const Value& Expr::literal() const { return node_->literal; }
std::span<const Expr> Expr::args() const { return node_->args; }

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Expr::Kind::Const: return a.type() == b.type() && a.literal() == b.literal();
    case Expr::Kind::Var:
    case Expr::Kind::UVar: return a.index() == b.index();
    case Expr::Kind::Func:
      if (a.index() != b.index()) return false;
      break;
    case Expr::Kind::Equal:
      if (a.type() != b.type()) return false;
      break;
  }
  auto xs = a.args();
  auto ys = b.args();
  if (xs.size() != ys.size()) return false;
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (!(xs[i] == ys[i])) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Sexpr

Sexpr Sexpr::star(Sexpr l, Sexpr r) {
  std::vector<Sexpr> kids;
  kids.reserve(2);
  kids.push_back(std::move(l));
  kids.push_back(std::move(r));
  return Sexpr(std::make_shared<const Node>(Node{Kind::Star, 0, {}, {}, {}, std::move(kids)}));
}
Sexpr Sexpr::emp() {
  static const Sexpr kEmp(std::make_shared<const Node>(Node{Kind::Emp, 0, {}, {}, {}, {}}));
  return kEmp;
}
Sexpr Sexpr::pred(std::size_t p, std::vector<Expr> args) {
  return Sexpr(std::make_shared<const Node>(Node{Kind::Pred, p, {}, {}, std::move(args), {}}));
}
Sexpr Sexpr::inj(Expr e) {
  return Sexpr(std::make_shared<const Node>(Node{Kind::Inj, 0, {}, {}, {std::move(e)}, {}}));
}
Sexpr Sexpr::exists(Tvar t, Sexpr body, std::string name) {
  return Sexpr(std::make_shared<const Node>(
      Node{Kind::Exists, 0, t, std::move(name), {}, {std::move(body)}}));
}
Sexpr Sexpr::star_all(std::vector<Sexpr> parts) {
  if (parts.empty()) return emp();
  Sexpr acc = parts.back();
  for (std::size_t i = parts.size() - 1; i-- > 0;) acc = star(parts[i], acc);
  return acc;
}

Sexpr::Kind Sexpr::kind() const { return node_->kind; }
const Sexpr& Sexpr::left() const { return node_->kids[0]; }
const Sexpr& Sexpr::right() const { return node_->kids[1]; }
const Sexpr& Sexpr::body() const { return node_->kids[0]; }
std::size_t Sexpr::index() const { return node_->index; }
std::span<const Expr> Sexpr::args() const { return node_->args; }
const Expr& Sexpr::expr() const { return node_->args[0]; }
const Tvar& Sexpr::type() const { return node_->type; }
const std::string& Sexpr::name() const { return node_->name; }

bool operator==(const Sexpr& a, const Sexpr& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Sexpr::Kind::Emp: return true;
    case Sexpr::Kind::Star: return a.left() == b.left() && a.right() == b.right();
    case Sexpr::Kind::Inj: return a.expr() == b.expr();
    case Sexpr::Kind::Exists: return a.type() == b.type() && a.body() == b.body();
    case Sexpr::Kind::Pred: {
      if (a.index() != b.index() || a.args().size() != b.args().size()) return false;
      for (std::size_t i = 0; i < a.args().size(); ++i)
        if (!(a.args()[i] == b.args()[i])) return false;
      return true;
    }
  }
  return false;
}

// ---------------------------------------------------------------------------
// Typing

namespace {

bool valid_sort(const Envs& envs, const Tvar& t) {
  return t.is_prop() || t.index() < envs.types.size();
}

}  // namespace

std::optional<Tvar> typecheck_expr(const Envs& envs, std::span<const Tvar> vars,
                                   std::span<const Tvar> uvars, const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::Const: {
      auto c = envs.carrier(e.type());
      if (!c || *c != carrier_of(e.literal())) return std::nullopt;
      return e.type();
    }
    case Expr::Kind::Var:
      if (e.index() >= vars.size()) return std::nullopt;
      return vars[e.index()];
    case Expr::Kind::UVar:
      if (e.index() >= uvars.size()) return std::nullopt;
      return uvars[e.index()];
    case Expr::Kind::Func: {
      if (e.index() >= envs.funcs.size()) return std::nullopt;
      const FuncSig& sig = envs.funcs[e.index()];
      if (sig.domain.size() != e.args().size()) return std::nullopt;
      for (std::size_t i = 0; i < sig.domain.size(); ++i) {
        auto t = typecheck_expr(envs, vars, uvars, e.args()[i]);
        if (!t || *t != sig.domain[i]) return std::nullopt;
      }
      if (!valid_sort(envs, sig.range)) return std::nullopt;
      return sig.range;
    }
    case Expr::Kind::Equal: {
      if (!valid_sort(envs, e.type())) return std::nullopt;
      auto l = typecheck_expr(envs, vars, uvars, e.lhs());
      auto r = typecheck_expr(envs, vars, uvars, e.rhs());
      if (!l || !r || *l != e.type() || *r != e.type()) return std::nullopt;
      return Tvar::prop();
    }
  }
  return std::nullopt;
}

bool typecheck_sexpr(const Envs& envs, std::span<const Tvar> vars, std::span<const Tvar> uvars,
                     const Sexpr& s) {
  switch (s.kind()) {
    case Sexpr::Kind::Emp: return true;
    case Sexpr::Kind::Star:
      return typecheck_sexpr(envs, vars, uvars, s.left()) &&
             typecheck_sexpr(envs, vars, uvars, s.right());
    case Sexpr::Kind::Inj: {
      auto t = typecheck_expr(envs, vars, uvars, s.expr());
      return t && t->is_prop();
    }
    case Sexpr::Kind::Pred: {
      if (s.index() >= envs.preds.size()) return false;
      const PredSig& sig = envs.preds[s.index()];
      if (sig.domain.size() != s.args().size()) return false;
      for (std::size_t i = 0; i < sig.domain.size(); ++i) {
        auto t = typecheck_expr(envs, vars, uvars, s.args()[i]);
        if (!t || *t != sig.domain[i]) return false;
      }
      return true;
    }
    case Sexpr::Kind::Exists: {
      if (!valid_sort(envs, s.type())) return false;
      std::vector<Tvar> inner(vars.begin(), vars.end());
      inner.push_back(s.type());
      return typecheck_sexpr(envs, inner, uvars, s.body());
    }
  }
  return false;
}

bool expr_syntactic_eq(const Envs& envs, const Expr& a, const Expr& b) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Expr::Kind::Const: {
      if (a.type() != b.type()) return false;
      if (a.type().is_prop()) return a.literal() == b.literal();
      if (a.type().index() >= envs.types.size()) return false;
      const EqTester* t = find_eq_test(envs.types[a.type().index()].eq_test);
      return t && t->test(a.literal(), b.literal());
    }
    case Expr::Kind::Var:
    case Expr::Kind::UVar: return a.index() == b.index();
    case Expr::Kind::Func:
      if (a.index() != b.index()) return false;
      break;
    case Expr::Kind::Equal:
      if (a.type() != b.type()) return false;
      break;
  }
  if (a.args().size() != b.args().size()) return false;
  for (std::size_t i = 0; i < a.args().size(); ++i)
    if (!expr_syntactic_eq(envs, a.args()[i], b.args()[i])) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Traversals

namespace {

Expr rebuild(const Expr& e, std::vector<Expr> args) {
  if (e.is(Expr::Kind::Func)) return Expr::func(e.index(), std::move(args));
  return Expr::equal(e.type(), std::move(args[0]), std::move(args[1]));
}

template <class Leaf>
Expr map_leaves(const Expr& e, Expr::Kind which, const Leaf& f) {
  switch (e.kind()) {
    case Expr::Kind::Const: return e;
    case Expr::Kind::Var:
    case Expr::Kind::UVar: return e.kind() == which ? f(e.index()) : e;
    case Expr::Kind::Func:
    case Expr::Kind::Equal: {
      std::vector<Expr> args;
      args.reserve(e.args().size());
      bool changed = false;
      for (const Expr& a : e.args()) {
        args.push_back(map_leaves(a, which, f));
        changed = changed || !(args.back() == a);
      }
      return changed ? rebuild(e, std::move(args)) : e;
    }
  }
  return e;
}

bool any_leaf(const Expr& e, Expr::Kind which, const std::function<bool(std::size_t)>& pred) {
  if (e.kind() == which) return pred(e.index());
  for (const Expr& a : e.args())
    if (any_leaf(a, which, pred)) return true;
  return false;
}

}  // namespace

Expr map_vars(const Expr& e, const std::function<Expr(std::size_t)>& f) {
  return map_leaves(e, Expr::Kind::Var, f);
}
Expr map_uvars(const Expr& e, const std::function<Expr(std::size_t)>& f) {
  return map_leaves(e, Expr::Kind::UVar, f);
}

bool mentions_var(const Expr& e, const std::function<bool(std::size_t)>& pred) {
  return any_leaf(e, Expr::Kind::Var, pred);
}
bool mentions_uvar(const Expr& e, const std::function<bool(std::size_t)>& pred) {
  return any_leaf(e, Expr::Kind::UVar, pred);
}

Expr lift_expr(const Expr& e, std::size_t skip, std::size_t by) {
  if (by == 0) return e;
  return map_vars(e, [&](std::size_t n) { return Expr::var(n >= skip ? n + by : n); });
}

Expr lift_uvars(const Expr& e, std::size_t skip, std::size_t by) {
  if (by == 0) return e;
  return map_uvars(e, [&](std::size_t n) { return Expr::uvar(n >= skip ? n + by : n); });
}

Sexpr lift_sexpr(const Sexpr& s, std::size_t skip, std::size_t by) {
  switch (s.kind()) {
    case Sexpr::Kind::Emp: return s;
    case Sexpr::Kind::Star:
      return Sexpr::star(lift_sexpr(s.left(), skip, by), lift_sexpr(s.right(), skip, by));
    case Sexpr::Kind::Inj: return Sexpr::inj(lift_expr(s.expr(), skip, by));
    case Sexpr::Kind::Pred: {
      std::vector<Expr> args;
      for (const Expr& a : s.args()) args.push_back(lift_expr(a, skip, by));
      return Sexpr::pred(s.index(), std::move(args));
    }
    case Sexpr::Kind::Exists:
      // Variables bound at or above `skip` keep their relative order; the
      // binder itself sits at the end of the context and is shifted as well.
      return Sexpr::exists(s.type(), lift_sexpr(s.body(), skip, by), s.name());
  }
  return s;
}

OpenedExists open_exists(const Sexpr& s) {
  OpenedExists out{{}, {}, s};
  while (out.body.is(Sexpr::Kind::Exists)) {
    out.binders.push_back(out.body.type());
    out.names.push_back(out.body.name());
    Sexpr next = out.body.body();
    out.body = next;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Ordering

namespace {

int rank(Expr::Kind k) {
  switch (k) {
    case Expr::Kind::Const: return 0;
    case Expr::Kind::Var: return 1;
    case Expr::Kind::Func: return 2;
    case Expr::Kind::Equal: return 3;
    case Expr::Kind::UVar: return 4;
  }
  return 5;
}

}  // namespace

std::strong_ordering args_compare(std::span<const Expr> a, std::span<const Expr> b) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i)
    if (auto c = expr_compare(a[i], b[i]); c != 0) return c;
  return a.size() <=> b.size();
}

std::strong_ordering expr_compare(const Expr& a, const Expr& b) {
  if (auto c = rank(a.kind()) <=> rank(b.kind()); c != 0) return c;
  switch (a.kind()) {
    case Expr::Kind::Const:
      if (auto c = a.type() <=> b.type(); c != 0) return c;
      return a.literal() <=> b.literal();
    case Expr::Kind::Var:
    case Expr::Kind::UVar: return a.index() <=> b.index();
    case Expr::Kind::Func:
      if (auto c = a.index() <=> b.index(); c != 0) return c;
      return args_compare(a.args(), b.args());
    case Expr::Kind::Equal:
      if (auto c = a.type() <=> b.type(); c != 0) return c;
      return args_compare(a.args(), b.args());
  }
  return std::strong_ordering::equal;
}

}  // namespace sepref
