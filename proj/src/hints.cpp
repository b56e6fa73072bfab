#include "sepref/hints.hpp"

#include <algorithm>

#include "sepref/syntax.hpp"
#include "sepref/unify.hpp"

namespace sepref {

TypeDecl unit_type() { return {"_", "bool_eq"}; }
FuncSig unit_func() { return {"_", {}, Tvar::prop(), "true"}; }
PredSig unit_pred() { return {"_", {}, "emp"}; }

Envs HintDatabase::instrument(const Envs& base) const {
  return {apply_constraint(types, base.types, unit_type()),
          apply_constraint(funcs, base.funcs, unit_func()),
          apply_constraint(preds, base.preds, unit_pred())};
}

Prover HintDatabase::prover() const {
  if (provers.empty()) return *make_prover("default");
  std::string spec;
  for (const auto& p : provers) spec += (spec.empty() ? "" : "+") + p;
  auto out = make_prover(spec);
  return out ? *out : *make_prover("default");
}

HintDatabase empty_db() { return {}; }

std::optional<HintDatabase> compose_db(const HintDatabase& a, const HintDatabase& b) {
  auto types = merge(a.types, b.types);
  auto funcs = merge(a.funcs, b.funcs);
  auto preds = merge(a.preds, b.preds);
  if (!types || !funcs || !preds) return std::nullopt;
  HintDatabase out;
  out.name = a.name.empty() ? b.name : (b.name.empty() ? a.name : a.name + "+" + b.name);
  out.types = std::move(*types);
  out.funcs = std::move(*funcs);
  out.preds = std::move(*preds);
  out.lemmas = a.lemmas;
  out.lemmas.insert(out.lemmas.end(), b.lemmas.begin(), b.lemmas.end());
  auto append_unique = [](std::vector<std::string>& dst, const std::vector<std::string>& src) {
    for (const auto& s : src)
      if (std::find(dst.begin(), dst.end(), s) == dst.end()) dst.push_back(s);
  };
  out.provers = a.provers;
  append_unique(out.provers, b.provers);
  out.memevals = a.memevals;
  append_unique(out.memevals, b.memevals);
  out.bounds = a.bounds ? a.bounds : b.bounds;
  return out;
}

namespace {

const Sexpr& matching_side(const HintLemma& l) {
  return l.direction == Direction::Forward ? l.lhs : l.rhs;
}
const Sexpr& rewritten_side(const HintLemma& l) {
  return l.direction == Direction::Forward ? l.rhs : l.lhs;
}

}  // namespace

std::optional<std::string> check_lemma(const Envs& envs, const HintLemma& lemma) {
  for (const Expr& p : lemma.pures) {
    auto t = typecheck_expr(envs, lemma.binders, {}, p);
    if (!t || !t->is_prop()) return "side condition of '" + lemma.name + "' is not a proposition";
  }
  if (!typecheck_sexpr(envs, lemma.binders, {}, lemma.lhs))
    return "left side of '" + lemma.name + "' does not typecheck";
  if (!typecheck_sexpr(envs, lemma.binders, {}, lemma.rhs))
    return "right side of '" + lemma.name + "' does not typecheck";
  SHeap m = normalize(matching_side(lemma), lemma.binders.size());
  if (!m.exists.empty() || m.atom_count() != 1)
    return "matching side of '" + lemma.name +
           "' must be a single predicate atom without existentials";
  return std::nullopt;
}

bool validate_lemma(const Envs& envs, const Interp& interp, const HintLemma& lemma,
                    const ModelBounds& bounds) {
  OracleQuery q;
  q.lhs = lemma.lhs;
  q.rhs = lemma.rhs;
  q.var_types = lemma.binders;
  q.premises = lemma.pures;
  return !oracle_counterexample(envs, interp, q, bounds);
}

namespace {

struct Application {
  UnfoldState next;
  std::string description;
};

// Try to rewrite atom `which` (of predicate `pred`) with `lemma`.
std::optional<Application> try_lemma(const Envs& envs, const UnfoldState& st, std::size_t pred,
                                     std::size_t which, const HintLemma& lemma,
                                     Direction direction, const Prover& prover,
                                     const Facts& facts, Trace* trace) {
  const std::size_t nb = lemma.binders.size();
  SHeap match = normalize(matching_side(lemma), nb);
  if (!match.exists.empty() || match.atom_count() != 1) return std::nullopt;
  const Atom pattern = match.atoms().front();
  if (pattern.pred != pred) return std::nullopt;

  // Lemma binders become temporary UVars U .. U+nb-1; the state's own UVars
  // stay rigid.
  const std::size_t U = st.uvars.size();
  auto open = [&](const Expr& e) {
    return map_vars(e, [&](std::size_t n) { return n < nb ? Expr::uvar(U + n) : Expr::var(n); });
  };
  std::vector<Expr> pattern_args;
  for (const Expr& a : pattern.args) pattern_args.push_back(open(a));
  const auto& target = st.heap.impures.at(pred)[which];
  auto s = args_unify(envs, target, pattern_args, Subst{}, UnifyOptions{U});
  if (!s) return std::nullopt;

  std::vector<Expr> side;
  for (const Expr& p : lemma.pures) side.push_back(instantiate(*s, open(p)));
  for (const Expr& p : match.pures) side.push_back(instantiate(*s, open(p)));
  for (const Expr& goal : side) {
    if (mentions_uvar(goal, [U](std::size_t n) { return n >= U; })) {
      emit(trace, "unfold", "skip " + lemma.name + ": side condition has an undetermined binder",
           render_expr(envs, goal, st.var_names));
      return std::nullopt;
    }
    if (!prover.prove(facts, goal)) {
      emit(trace, "unfold", "skip " + lemma.name + ": cannot discharge side condition",
           render_expr(envs, goal, st.var_names));
      return std::nullopt;
    }
  }

  UnfoldState next = st;
  const bool forward = direction == Direction::Forward;
  // Fresh binder for an unbound lemma variable or a hoisted existential.
  auto fresh = [&](const Tvar& t, const std::string& name) {
    if (forward) {
      next.vars.push_back(t);
      next.var_names.push_back(name);
      return Expr::var(next.vars.size() - 1);
    }
    next.uvars.push_back(t);
    return Expr::uvar(next.uvars.size() - 1);
  };
  std::vector<std::optional<Expr>> unbound(nb);
  for (std::size_t i = 0; i < nb; ++i)
    if (!s->lookup(U + i))
      unbound[i] = fresh(lemma.binders[i], i < lemma.binder_names.size() ? lemma.binder_names[i] : "");
  auto close = [&](const Expr& e) {
    return map_uvars(instantiate(*s, e), [&](std::size_t n) {
      return n >= U && n - U < nb ? *unbound[n - U] : Expr::uvar(n);
    });
  };
  std::vector<Expr> binder_values;
  for (std::size_t i = 0; i < nb; ++i) binder_values.push_back(close(Expr::uvar(U + i)));

  SHeap other = normalize(rewritten_side(lemma), nb);
  std::vector<Expr> hoisted;
  for (std::size_t i = 0; i < other.exists.size(); ++i)
    hoisted.push_back(fresh(other.exists[i], other.exists_names[i]));
  auto place = [&](const Expr& e) {
    return map_vars(e, [&](std::size_t n) {
      if (n < nb) return binder_values[n];
      if (n - nb < hoisted.size()) return hoisted[n - nb];
      return Expr::var(n);
    });
  };

  auto& list = next.heap.impures[pred];
  list.erase(list.begin() + static_cast<std::ptrdiff_t>(which));
  if (list.empty()) next.heap.impures.erase(pred);
  for (const auto& [p, atoms] : other.impures)
    for (const auto& args : atoms) {
      std::vector<Expr> placed;
      for (const Expr& a : args) placed.push_back(place(a));
      next.heap.add_atom(p, std::move(placed));
    }
  for (const Expr& p : other.pures) (forward ? next.pures : next.heap.pures).push_back(place(p));

  return Application{std::move(next), lemma.name};
}

std::string show(const Envs& envs, const UnfoldState& st) {
  return render_heap(envs, st.heap, st.var_names);
}

}  // namespace

UnfoldResult unfold(const Envs& envs, UnfoldState state, const HintDatabase& db,
                    Direction direction, std::size_t fuel, const Prover& prover, Trace* trace) {
  UnfoldResult result{std::move(state), 0};
  while (result.applications < fuel) {
    const Facts facts = prover.summarize(envs, result.state.pures);
    std::optional<Application> applied;
    for (const auto& [pred, atoms] : result.state.heap.impures) {
      for (std::size_t k = 0; k < atoms.size() && !applied; ++k)
        for (const HintLemma& lemma : db.lemmas) {
          if (lemma.direction != direction) continue;
          applied = try_lemma(envs, result.state, pred, k, lemma, direction, prover, facts, trace);
          if (applied) break;
        }
      if (applied) break;
    }
    if (!applied) break;
    if (trace) {
      emit(trace, "unfold",
           std::string(direction == Direction::Forward ? "forward " : "backward ") +
               applied->description,
           show(envs, result.state), show(envs, applied->next));
    }
    result.state = std::move(applied->next);
    ++result.applications;
  }
  return result;
}

}  // namespace sepref
