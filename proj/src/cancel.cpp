#include "sepref/cancel.hpp"

#include <algorithm>

#include "sepref/syntax.hpp"

namespace sepref {

namespace {

struct Canceller {
  const Envs& envs;
  const Prover& prover;
  std::size_t pre;         // caller UVars
  std::size_t uvar_scope;  // Vars visible to caller UVars
  Facts facts;
  Subst s;

  // Caller UVars may only be bound to terms over variables in their scope.
  bool scope_ok(const Subst& cand) const {
    for (const auto& [u, image] : cand.bindings())
      if (u < pre && mentions_var(image, [this](std::size_t n) { return n >= uvar_scope; }))
        return false;
    return true;
  }

  bool try_unify(const Expr& a, const Expr& b, Subst& cur) const {
    auto next = expr_unify(envs, a, b, cur);
    if (!next || !scope_ok(*next)) return false;
    cur = std::move(*next);
    return true;
  }

  bool equal_arg(const Expr& a, const Expr& b, const Tvar& t, Subst& cur) const {
    if (try_unify(a, b, cur)) return true;
    const Expr ai = instantiate(cur, a);
    const Expr bi = instantiate(cur, b);
    if (prover.prove(facts, Expr::equal(t, ai, bi))) return true;
    auto obligations = congruence_split(envs, ai, bi, t);
    Subst trial = cur;
    for (const Obligation& o : obligations) {
      if (try_unify(o.lhs, o.rhs, trial)) continue;
      if (!prover.prove(facts, Expr::equal(o.type, instantiate(trial, o.lhs),
                                           instantiate(trial, o.rhs))))
        return false;
    }
    cur = std::move(trial);
    return true;
  }

  std::optional<Subst> match(const Atom& l, const Atom& r) const {
    if (l.pred != r.pred) return std::nullopt;
    const PredSig& sig = envs.preds[l.pred];
    Subst cur = s;
    for (std::size_t i = 0; i < l.args.size(); ++i)
      if (!equal_arg(l.args[i], r.args[i], sig.domain[i], cur)) return std::nullopt;
    return cur;
  }
};

// Structural compatibility treating UVars as wildcards; a cheap filter run
// before full matching.
bool may_unify(const Envs& envs, const Expr& a, const Expr& b) {
  if (a.is(Expr::Kind::UVar) || b.is(Expr::Kind::UVar)) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Expr::Kind::Const:
    case Expr::Kind::Var: return expr_syntactic_eq(envs, a, b);
    case Expr::Kind::Func:
      if (a.index() != b.index()) return false;
      break;
    case Expr::Kind::Equal:
      if (a.type() != b.type()) return false;
      break;
    case Expr::Kind::UVar: break;
  }
  if (a.args().size() != b.args().size()) return false;
  for (std::size_t i = 0; i < a.args().size(); ++i)
    if (!may_unify(envs, a.args()[i], b.args()[i])) return false;
  return true;
}

Atom instantiate_atom(const Subst& s, const Atom& a) {
  Atom out{a.pred, {}};
  for (const Expr& e : a.args) out.args.push_back(instantiate(s, e));
  return out;
}

}  // namespace

Residual cancel_heaps(const Envs& envs, const CancelInput& in, const Prover& prover,
                      Trace* trace) {
  const std::size_t nv = in.vars.size();
  const std::size_t pre = in.caller_uvars;
  const std::size_t nu = in.uvars.size();

  Residual r;
  r.foralls = in.vars;
  r.forall_names = in.var_names;
  r.forall_names.resize(nv);
  for (std::size_t i = 0; i < in.lhs.exists.size(); ++i) {
    r.foralls.push_back(in.lhs.exists[i]);
    r.forall_names.push_back(i < in.lhs.exists_names.size() ? in.lhs.exists_names[i] : "");
  }
  r.pre_uvars.assign(in.uvars.begin(), in.uvars.begin() + static_cast<std::ptrdiff_t>(pre));

  // Conclusion existentials become fresh UVars after the caller's.
  std::vector<Tvar> uvar_types = in.uvars;
  uvar_types.insert(uvar_types.end(), in.rhs.exists.begin(), in.rhs.exists.end());
  const SHeap rhs = map_exprs(in.rhs, [&](const Expr& e) {
    return map_vars(e, [&](std::size_t n) {
      return n >= nv && n - nv < in.rhs.exists.size() ? Expr::uvar(nu + n - nv) : Expr::var(n);
    });
  });

  Canceller c{envs, prover, pre, in.uvar_scope, prover.summarize(envs, in.lhs.pures), {}};

  std::vector<Atom> lhs_atoms = in.lhs.atoms();
  std::vector<Atom> rhs_atoms = rhs.atoms();
  std::stable_sort(lhs_atoms.begin(), lhs_atoms.end(),
                   [](const Atom& a, const Atom& b) { return atom_order(a, b) < 0; });
  std::vector<bool> lhs_live(lhs_atoms.size(), true), rhs_live(rhs_atoms.size(), true);

  for (bool progress = true; progress;) {
    progress = false;
    std::vector<std::size_t> order;
    std::vector<std::optional<Atom>> current(rhs_atoms.size());
    for (std::size_t j = 0; j < rhs_atoms.size(); ++j)
      if (rhs_live[j]) {
        order.push_back(j);
        current[j] = instantiate_atom(c.s, rhs_atoms[j]);
      }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return atom_order(*current[a], *current[b]) < 0;
    });
    for (std::size_t j : order) {
      const Atom target = instantiate_atom(c.s, rhs_atoms[j]);
      auto plausible = [&](std::size_t i) {
        const Atom& l = lhs_atoms[i];
        for (std::size_t k = 0; k < l.args.size(); ++k)
          if (!may_unify(envs, instantiate(c.s, l.args[k]), target.args[k])) return false;
        return true;
      };
      // Syntactically unifiable partners first, then any the prover accepts.
      std::optional<std::pair<std::size_t, Subst>> found;
      for (int pass = 0; pass < 2 && !found; ++pass)
        for (std::size_t i = 0; i < lhs_atoms.size() && !found; ++i) {
          if (!lhs_live[i] || lhs_atoms[i].pred != target.pred) continue;
          if ((pass == 0) != plausible(i)) continue;
          if (auto next = c.match(lhs_atoms[i], rhs_atoms[j])) found.emplace(i, std::move(*next));
        }
      if (!found) continue;
      const std::size_t i = found->first;
      if (trace)
        emit(trace, "cancel", "cancel " + envs.preds[target.pred].name,
             render_atom(envs, instantiate_atom(c.s, lhs_atoms[i]), r.forall_names),
             render_atom(envs, instantiate_atom(found->second, rhs_atoms[j]), r.forall_names));
      c.s = std::move(found->second);
      lhs_live[i] = rhs_live[j] = false;
      progress = true;
    }
  }

  // Conclusion pures: discharge by the prover or solve equations by
  // unification, until neither makes progress.
  std::vector<Expr> goals = rhs.pures;
  for (bool progress = true; progress;) {
    progress = false;
    std::vector<Expr> left;
    for (const Expr& g : goals) {
      const Expr gi = instantiate(c.s, g);
      if (prover.prove(c.facts, gi)) {
        emit(trace, "cancel", "discharge", render_expr(envs, gi, r.forall_names));
        progress = true;
        continue;
      }
      if (gi.is(Expr::Kind::Equal) && c.try_unify(gi.lhs(), gi.rhs(), c.s)) {
        emit(trace, "cancel", "solve", render_expr(envs, gi, r.forall_names));
        progress = true;
        continue;
      }
      left.push_back(g);
    }
    goals = std::move(left);
  }

  // Compact the unresolved fresh UVars; resolved ones are substituted out.
  std::vector<std::optional<std::size_t>> renum(uvar_types.size());
  for (std::size_t u = pre; u < uvar_types.size(); ++u)
    if (!c.s.lookup(u)) {
      renum[u] = pre + r.exists_left.size();
      r.exists_left.push_back(uvar_types[u]);
    }
  auto finish = [&](const Expr& e) {
    return map_uvars(instantiate(c.s, e), [&](std::size_t n) {
      return n >= pre && n < renum.size() && renum[n] ? Expr::uvar(*renum[n]) : Expr::uvar(n);
    });
  };

  for (const auto& [u, image] : c.s.bindings())
    if (u < pre) r.uvar_equations.emplace_back(u, finish(image));
  r.subst = c.s;

  for (const Expr& p : in.lhs.pures) r.lhs_rem.pures.push_back(finish(p));
  for (std::size_t i = 0; i < lhs_atoms.size(); ++i)
    if (lhs_live[i]) {
      std::vector<Expr> args;
      for (const Expr& a : lhs_atoms[i].args) args.push_back(finish(a));
      r.lhs_rem.add_atom(lhs_atoms[i].pred, std::move(args));
    }
  for (const Expr& g : goals) r.rhs_rem.pures.push_back(finish(g));
  for (std::size_t j = 0; j < rhs_atoms.size(); ++j)
    if (rhs_live[j]) {
      std::vector<Expr> args;
      for (const Expr& a : rhs_atoms[j].args) args.push_back(finish(a));
      r.rhs_rem.add_atom(rhs_atoms[j].pred, std::move(args));
    }
  return r;
}

Residual cancel(const Envs& envs, const Sexpr& lhs, const Sexpr& rhs, const Prover& prover,
                const std::vector<Tvar>& pre_uvars, Trace* trace) {
  CancelInput in;
  in.uvars = pre_uvars;
  in.caller_uvars = pre_uvars.size();
  in.lhs = normalize(lhs);
  in.rhs = normalize(rhs);
  return cancel_heaps(envs, in, prover, trace);
}

bool residual_trivial(const Envs& envs, const Residual& r, const Prover& prover) {
  if (r.mem_fault || !r.lhs_rem.no_atoms() || !r.rhs_rem.no_atoms()) return false;
  if (r.rhs_rem.pures.empty()) return true;
  const Facts facts = prover.summarize(envs, r.lhs_rem.pures);
  return std::all_of(r.rhs_rem.pures.begin(), r.rhs_rem.pures.end(),
                     [&](const Expr& g) { return prover.prove(facts, g); });
}

}  // namespace sepref
