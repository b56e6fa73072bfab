#pragma once

// Concrete semantics over finite 32-bit-word heaps. This is the checker the
// engine is validated against: expressions evaluate to Values, assertions to
// decidable predicates on heaps, and entailments are decided by exhaustive
// enumeration of small heaps and sampled quantifier instances.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sepref/term.hpp"
#include "sepref/value.hpp"

namespace sepref {

/// Address -> word. Address 0 is never allocated.
using Heap = std::map<std::uint32_t, std::uint32_t>;

using Binding = std::pair<Tvar, Value>;
using Assignment = std::vector<Binding>;

struct FuncImpl {
  std::size_t arity;
  std::function<std::optional<Value>(std::span<const Value>)> fn;
};

struct PredImpl {
  std::size_t arity;
  std::function<bool(std::span<const Value>, const Heap&)> fn;
};

/// Interpretation registry behind the identifiers named in Envs.
///
/// A nullary function whose interp is `free` is an uninterpreted global; its
/// value is looked up by function name in `free_values` (the oracle
/// enumerates these).
struct Interp {
  std::map<std::string, FuncImpl, std::less<>> funcs;
  std::map<std::string, PredImpl, std::less<>> preds;
  std::map<std::string, Value, std::less<>> free_values;

  static Interp builtin();
};

inline constexpr std::string_view kFreeInterp = "free";

/// Empty when every identifier referenced by `envs` resolves with the right
/// arity and every type names a registered equality tester; otherwise a
/// description of the first problem.
std::optional<std::string> check_envs(const Envs& envs, const Interp& interp);

/// Indices of the free (uninterpreted nullary) functions of `envs`.
std::vector<std::size_t> free_globals(const Envs& envs);

struct ModelBounds {
  std::uint32_t max_address = 4;
  std::uint32_t address_step = 1;
  /// Contents a heap cell may hold during enumeration.
  std::vector<std::uint32_t> heap_values{0, 1, 2, 3};
  /// Per-sort samples; sorts without an entry fall back to carrier samples.
  std::map<Tvar, std::vector<Value>> value_samples;
  std::map<Carrier, std::vector<Value>> carrier_samples;

  /// Words {0..3}, addresses 1..4, small tail-closed sequences.
  static ModelBounds desk();
  std::vector<std::uint32_t> addresses() const;
  std::vector<Value> samples(const Envs& envs, const Tvar& t) const;
};

std::optional<Value> denote_expr(const Envs& envs, const Interp& interp,
                                 std::span<const Binding> uvar_values,
                                 std::span<const Binding> var_values, const Expr& e,
                                 const Tvar& t);

/// Pure assertions hold only on the empty heap; Star splits the heap into
/// disjoint parts; Exists ranges over the bounds' samples and, at word
/// sorts, the addresses and contents of the heap at hand.
bool denote_sexpr(const Envs& envs, const Interp& interp, std::span<const Binding> uvar_values,
                  std::span<const Binding> var_values, const Sexpr& s, const Heap& h,
                  const ModelBounds& bounds);

/// Everything the exhaustive entailment check quantifies over.
struct OracleQuery {
  Sexpr lhs = Sexpr::emp();
  Sexpr rhs = Sexpr::emp();
  /// Universally quantified regular variables (lemma binders).
  std::vector<Tvar> var_types;
  std::vector<Tvar> uvar_types;
  /// Assignments falsifying any premise are skipped.
  std::vector<Expr> premises;
  /// UVars whose value is computed from an expression over the other
  /// variables instead of being enumerated.
  std::map<std::size_t, Expr> derived_uvars;
};

struct Counterexample {
  Heap heap;
  std::map<std::string, Value> globals;
  Assignment vars;
  Assignment uvars;
};

std::optional<Counterexample> oracle_counterexample(const Envs& envs, const Interp& interp,
                                                    const OracleQuery& query,
                                                    const ModelBounds& bounds);

/// lhs entails rhs for every heap within bounds and every sampled
/// assignment of globals and unification variables.
bool entails_oracle(const Envs& envs, const Interp& interp, std::span<const Tvar> uvars,
                    const Sexpr& lhs, const Sexpr& rhs, const ModelBounds& bounds);

std::string to_string(const Heap& h);

}  // namespace sepref
