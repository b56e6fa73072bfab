#pragma once

// Environment constraints, refinement-hint lemmas, packaged hint databases
// and the unification-based unfolding engine shared by forward refinement
// (hypotheses) and backward refinement (conclusions).

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "sepref/model.hpp"
#include "sepref/provers.hpp"
#include "sepref/sheap.hpp"
#include "sepref/term.hpp"
#include "sepref/trace.hpp"

namespace sepref {

/// Per position: unconstrained, or a required declaration.
template <class T>
using EnvConstraint = std::vector<std::optional<T>>;

/// Instrument `env` so that it satisfies `c`: required entries override,
/// unconstrained positions keep env's entry, or `unit` once env runs out.
template <class T>
std::vector<T> apply_constraint(const EnvConstraint<T>& c, const std::vector<T>& env,
                                const T& unit) {
  std::vector<T> out;
  const std::size_t n = std::max(c.size(), env.size());
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i < c.size() && c[i])
      out.push_back(*c[i]);
    else if (i < env.size())
      out.push_back(env[i]);
    else
      out.push_back(unit);
  }
  return out;
}

template <class T>
bool satisfies(const EnvConstraint<T>& c, const std::vector<T>& env) {
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c[i] && (i >= env.size() || !(env[i] == *c[i]))) return false;
  return true;
}

template <class T>
bool compatible(const EnvConstraint<T>& a, const EnvConstraint<T>& b) {
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i)
    if (a[i] && b[i] && !(*a[i] == *b[i])) return false;
  return true;
}

template <class T>
std::optional<EnvConstraint<T>> merge(const EnvConstraint<T>& a, const EnvConstraint<T>& b) {
  if (!compatible(a, b)) return std::nullopt;
  EnvConstraint<T> out(std::max(a.size(), b.size()));
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (i < a.size() && a[i])
      out[i] = a[i];
    else if (i < b.size())
      out[i] = b[i];
  }
  return out;
}

TypeDecl unit_type();
FuncSig unit_func();
PredSig unit_pred();

enum class Direction { Forward, Backward };

/// forall binders, pures -> lhs ===> rhs. Forward lemmas rewrite a
/// hypothesis atom matching lhs into rhs; backward lemmas rewrite a
/// conclusion atom matching rhs into lhs. The matching side must normalize
/// to exactly one atom without existentials.
struct HintLemma {
  std::string name;
  std::vector<Tvar> binders;
  std::vector<std::string> binder_names;
  std::vector<Expr> pures;
  Sexpr lhs = Sexpr::emp();
  Sexpr rhs = Sexpr::emp();
  Direction direction = Direction::Forward;
};

struct HintDatabase {
  std::string name;
  EnvConstraint<TypeDecl> types;
  EnvConstraint<FuncSig> funcs;
  EnvConstraint<PredSig> preds;
  std::vector<HintLemma> lemmas;
  /// Disjunction of named provers used for side conditions.
  std::vector<std::string> provers;
  std::vector<std::string> memevals;
  /// Bounds at which the lemmas are documented to validate.
  std::optional<ModelBounds> bounds;

  /// The environment obtained by instrumenting `base` with the constraints.
  Envs instrument(const Envs& base = {}) const;
  /// Disjunction of the named provers; the default prover when none named.
  Prover prover() const;
};

HintDatabase empty_db();

/// Merge constraints, concatenate lemmas and evaluators, disjoin provers.
/// Absent when any constraint pair is incompatible.
std::optional<HintDatabase> compose_db(const HintDatabase& a, const HintDatabase& b);

/// Empty when the lemma is well formed in `envs`; otherwise the reason.
std::optional<std::string> check_lemma(const Envs& envs, const HintLemma& lemma);

/// Bounded model check: for every sampled binder assignment satisfying the
/// pures, lhs entails rhs.
bool validate_lemma(const Envs& envs, const Interp& interp, const HintLemma& lemma,
                    const ModelBounds& bounds);

/// Refinement state. `heap` carries no existential prefix: its binders have
/// been opened into `vars` (hypotheses) or `uvars` (conclusions). `pures`
/// are the known facts.
struct UnfoldState {
  std::vector<Tvar> vars;
  std::vector<std::string> var_names;
  std::vector<Tvar> uvars;
  std::vector<Expr> pures;
  SHeap heap;
};

struct UnfoldResult {
  UnfoldState state;
  std::size_t applications = 0;
};

/// Apply lemmas of `direction` until none applies or `fuel` applications
/// have been made. Atoms are tried in heap order, lemmas in registration
/// order; a lemma whose side conditions the prover cannot discharge is
/// skipped. Forward application hoists new binders to fresh Vars and adds
/// the rewritten side's pures to the facts; backward application hoists
/// them to fresh UVars and adds pures as obligations to `heap.pures`.
UnfoldResult unfold(const Envs& envs, UnfoldState state, const HintDatabase& db,
                    Direction direction, std::size_t fuel, const Prover& prover,
                    Trace* trace = nullptr);

}  // namespace sepref
