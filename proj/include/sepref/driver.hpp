#pragma once

// End-to-end pipelines behind the command-line tool and the Python module:
// hint database loading, entailment checking with oracle cross-checks, block
// verification and the linked-list benchmark family.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sepref/cancel.hpp"
#include "sepref/hints.hpp"
#include "sepref/model.hpp"
#include "sepref/provers.hpp"
#include "sepref/symexec.hpp"
#include "sepref/syntax.hpp"
#include "sepref/trace.hpp"

namespace sepref {

/// Source text of a hint database shipped with the library (`sll`, `bst`).
std::optional<std::string_view> builtin_hints(std::string_view name);

/// A builtin name or a path to a hint file; throws std::runtime_error
/// (ParseError for malformed text) when neither works.
HintDatabase load_hints(const std::string& name_or_path);
/// Compose the named databases left to right.
HintDatabase load_hint_list(const std::vector<std::string>& names);

struct CheckReport {
  Residual residual;
  bool proved = false;
  std::size_t unfold_count = 0;
  double cancel_ms = 0;
  double total_ms = 0;
};

/// Forward-refine the hypothesis, backward-refine the conclusion, cancel.
/// Goal variables are universal; the goal's UVars are the caller's.
CheckReport check_entailment(const GoalFile& goal, const HintDatabase& db, const Prover& prover,
                             std::size_t fuel, Trace* trace = nullptr);

/// Verify a program goal with the memory evaluator `mev`.
CheckReport check_program(const GoalFile& goal, const HintDatabase& db, const Prover& prover,
                          const MemEvaluator& mev, std::size_t fuel, Trace* trace = nullptr);

/// The claim a trivially closed residual makes about an entailment goal:
/// the goal's UVars solved by the residual's equations are replaced by their
/// images (unsolved residual existentials become conclusion existentials);
/// the remaining UVars and all goal variables are universal.
OracleQuery claim_query(const GoalFile& goal, const Residual& r);

/// p_0 |-> x_0, p_1 * ... * p_{n-1} |-> x_{n-1}, p_n with the non-null facts
/// ===> sll([x_0, ..., x_{n-1}], p_0), over the sll database declarations.
GoalFile gen_sll_goal(std::size_t n);

struct BenchRow {
  std::size_t n = 0;
  std::size_t unfold_count = 0;
  double cancel_ms = 0;
  double total_ms = 0;
  bool proved = false;
};

BenchRow bench_sll(std::size_t n);
std::string bench_csv_header();
std::string bench_csv_row(const BenchRow& row);

struct LemmaCheck {
  std::string name;
  bool ok = false;
};

/// Validate every lemma of `db` at `bounds` (or the database's documented
/// bounds, or desk bounds).
std::vector<LemmaCheck> validate_hints(const HintDatabase& db,
                                       const std::optional<ModelBounds>& bounds = std::nullopt);

}  // namespace sepref
