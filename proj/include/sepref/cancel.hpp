#pragma once

// Unification-driven cancellation of a normalized entailment.

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sepref/provers.hpp"
#include "sepref/sheap.hpp"
#include "sepref/term.hpp"
#include "sepref/trace.hpp"
#include "sepref/unify.hpp"

namespace sepref {

/// What is left of `lhs ===> rhs` after cancellation, read as
///   forall foralls, lhs_rem ===> exists exists_left, rhs_rem /\ uvar_equations.
///
/// `foralls` is the whole regular-variable context of the remainder: the
/// ambient variables of the input followed by the hypothesis existentials.
/// UVars below `pre_uvars.size()` are the caller's; `exists_left` occupy the
/// UVar positions after them.
struct Residual {
  std::vector<Tvar> foralls;
  std::vector<std::string> forall_names;
  std::vector<Tvar> pre_uvars;
  std::vector<Tvar> exists_left;
  Subst subst;
  std::vector<std::pair<std::size_t, Expr>> uvar_equations;
  SHeap lhs_rem;
  SHeap rhs_rem;
  /// Set when symbolic execution could not justify the access at this
  /// instruction index; the remainder is then meaningless.
  std::optional<std::size_t> mem_fault;

  bool operator==(const Residual&) const = default;
};

struct CancelInput {
  /// Ambient regular variables both sides may mention.
  std::vector<Tvar> vars;
  std::vector<std::string> var_names;
  /// Every UVar either side mentions. The first `caller_uvars` belong to
  /// the caller and are reported through uvar_equations; the rest were
  /// introduced for conclusion binders (as by backward refinement) and are
  /// substituted out or left existential.
  std::vector<Tvar> uvars;
  std::size_t caller_uvars = 0;
  /// Number of leading ambient variables in scope of the caller's UVars.
  /// A caller UVar is never bound to a term mentioning a later variable.
  std::size_t uvar_scope = 0;
  /// Both normalized with base vars.size().
  SHeap lhs;
  SHeap rhs;
};

Residual cancel_heaps(const Envs& envs, const CancelInput& in, const Prover& prover,
                      Trace* trace = nullptr);

/// Cancel two closed assertions whose UVars are typed by `pre_uvars`.
Residual cancel(const Envs& envs, const Sexpr& lhs, const Sexpr& rhs, const Prover& prover,
                const std::vector<Tvar>& pre_uvars, Trace* trace = nullptr);

/// No atoms remain on either side, no fault, and every remaining conclusion
/// pure is proven from the remaining hypothesis pures.
bool residual_trivial(const Envs& envs, const Residual& r, const Prover& prover);

}  // namespace sepref
