#include "sepref/unify.hpp"

namespace sepref {

const Expr* Subst::lookup(std::size_t u) const {
  auto it = map_.find(u);
  return it == map_.end() ? nullptr : &it->second;
}

void Subst::bind(std::size_t u, const Expr& e) {
  const Expr image = instantiate(*this, e);
  for (auto& [k, v] : map_)
    if (mentions_uvar(v, [u](std::size_t n) { return n == u; }))
      v = map_uvars(v, [&](std::size_t n) { return n == u ? image : Expr::uvar(n); });
  map_.insert_or_assign(u, image);
}

bool occurs(std::size_t u, const Expr& e, const Subst& s) {
  return mentions_uvar(instantiate(s, e), [u](std::size_t n) { return n == u; });
}

Expr instantiate(const Subst& s, const Expr& e) {
  if (s.empty()) return e;
  return map_uvars(e, [&](std::size_t n) {
    const Expr* image = s.lookup(n);
    return image ? *image : Expr::uvar(n);
  });
}

Sexpr instantiate(const Subst& s, const Sexpr& e) {
  switch (e.kind()) {
    case Sexpr::Kind::Emp: return e;
    case Sexpr::Kind::Star: return Sexpr::star(instantiate(s, e.left()), instantiate(s, e.right()));
    case Sexpr::Kind::Inj: return Sexpr::inj(instantiate(s, e.expr()));
    case Sexpr::Kind::Exists: return Sexpr::exists(e.type(), instantiate(s, e.body()), e.name());
    case Sexpr::Kind::Pred: {
      std::vector<Expr> args;
      for (const Expr& a : e.args()) args.push_back(instantiate(s, a));
      return Sexpr::pred(e.index(), std::move(args));
    }
  }
  return e;
}

namespace {

bool unify_into(const Envs& envs, const Expr& a0, const Expr& b0, Subst& s,
                const UnifyOptions& opts) {
  const Expr a = instantiate(s, a0);
  const Expr b = instantiate(s, b0);
  const bool a_free = a.is(Expr::Kind::UVar) && a.index() >= opts.first_bindable;
  const bool b_free = b.is(Expr::Kind::UVar) && b.index() >= opts.first_bindable;

  if (a.is(Expr::Kind::UVar) && b.is(Expr::Kind::UVar) && a.index() == b.index()) return true;
  if (a_free && b_free) {
    if (a.index() > b.index())
      s.bind(a.index(), b);
    else
      s.bind(b.index(), a);
    return true;
  }
  if (a_free || b_free) {
    const Expr& u = a_free ? a : b;
    const Expr& t = a_free ? b : a;
    if (occurs(u.index(), t, s)) return false;
    s.bind(u.index(), t);
    return true;
  }
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Expr::Kind::Const:
    case Expr::Kind::Var:
    case Expr::Kind::UVar: return expr_syntactic_eq(envs, a, b);
    case Expr::Kind::Func:
      if (a.index() != b.index()) return false;
      break;
    case Expr::Kind::Equal:
      if (a.type() != b.type()) return false;
      break;
  }
  if (a.args().size() != b.args().size()) return false;
  for (std::size_t i = 0; i < a.args().size(); ++i)
    if (!unify_into(envs, a.args()[i], b.args()[i], s, opts)) return false;
  return true;
}

}  // namespace

std::optional<Subst> expr_unify(const Envs& envs, const Expr& a, const Expr& b, const Subst& s,
                                const UnifyOptions& opts) {
  Subst out = s;
  if (!unify_into(envs, a, b, out, opts)) return std::nullopt;
  return out;
}

std::optional<Subst> args_unify(const Envs& envs, std::span<const Expr> a,
                                std::span<const Expr> b, const Subst& s,
                                const UnifyOptions& opts) {
  if (a.size() != b.size()) return std::nullopt;
  Subst out = s;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!unify_into(envs, a[i], b[i], out, opts)) return std::nullopt;
  return out;
}

bool subst_holds(const Envs& envs, const Interp& interp, std::span<const Binding> uvar_values,
                 const Subst& s, std::span<const Binding> var_values) {
  for (const auto& [u, image] : s.bindings()) {
    if (u >= uvar_values.size()) return false;
    const Tvar& t = uvar_values[u].first;
    auto lhs = denote_expr(envs, interp, uvar_values, var_values, Expr::uvar(u), t);
    auto rhs = denote_expr(envs, interp, uvar_values, var_values, image, t);
    if (!lhs || !rhs || *lhs != *rhs) return false;
  }
  return true;
}

}  // namespace sepref
