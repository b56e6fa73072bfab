#pragma once

// Text syntax for terms, goal files and hint databases.
//
// Expressions use infix notation for functions named `+ - = != < <=`
// (`=` is always the typed Equal node) and `f(a, b)` otherwise. Assertions
// are `emp`, `[| e |]`, `p(args)`, `A * B` (right-associative) and
// `EX x:t. A` (extends as far right as possible). Declarations use
// S-expression forms; see docs/format.md.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sepref/cancel.hpp"
#include "sepref/hints.hpp"
#include "sepref/model.hpp"
#include "sepref/sheap.hpp"
#include "sepref/symexec.hpp"
#include "sepref/term.hpp"

namespace sepref {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t col, const std::string& msg);
  std::size_t line() const { return line_; }
  std::size_t col() const { return col_; }

 private:
  std::size_t line_;
  std::size_t col_;
};

/// Variable context for parsing and rendering: names and sorts of the
/// regular variables (by level) and of the UVars (by index). Empty names
/// render as fresh `v`-names.
struct Scope {
  std::vector<std::string> var_names;
  std::vector<Tvar> vars;
  std::vector<std::string> uvar_names;
  std::vector<Tvar> uvars;
};

std::string render_type(const Envs& envs, const Tvar& t);
std::string render_expr(const Envs& envs, const Expr& e,
                        const std::vector<std::string>& var_names = {});
std::string render_sexpr(const Envs& envs, const Sexpr& s,
                         const std::vector<std::string>& var_names = {});
std::string render_atom(const Envs& envs, const Atom& a,
                        const std::vector<std::string>& var_names = {});
/// The denormalized heap; its Exists prefix binds levels after var_names.
std::string render_heap(const Envs& envs, const SHeap& h,
                        const std::vector<std::string>& var_names = {});

Expr parse_expr(const Envs& envs, std::string_view text, const Scope& scope = {},
                std::optional<Tvar> expected = std::nullopt);
Sexpr parse_sexpr(const Envs& envs, std::string_view text, const Scope& scope = {});

struct GoalFile {
  Envs envs;
  /// Universally quantified variables; the registers of a program goal.
  std::vector<Tvar> vars;
  std::vector<std::string> var_names;
  std::vector<Tvar> uvars;
  std::vector<std::string> uvar_names;
  bool is_program = false;
  Sexpr lhs = Sexpr::emp();  // entailment, or the precondition
  Sexpr rhs = Sexpr::emp();  // entailment, or the postcondition
  std::vector<Instr> prog;

  Block block() const;
};

/// `base` holds declarations provided by hint databases. A goal
/// declaration whose name is already declared must be identical to it;
/// others are appended.
GoalFile parse_goal(std::string_view text, const Envs& base = {});
std::string render_goal(const GoalFile& g);

HintDatabase parse_hints(std::string_view text);
std::string render_hints(const HintDatabase& db);

/// `addr=16 step=4 heap=0,4,8 w=0,1,2 ls=[],[1]`: the keys `addr`, `step`
/// and `heap` set the heap shape; any other key names a type and lists its
/// samples. `desk` alone (or an empty string) is ModelBounds::desk().
ModelBounds parse_bounds(const Envs& envs, std::string_view text);
std::string render_bounds(const Envs& envs, const ModelBounds& b);

/// The residual as a goal that can be checked again: foralls become goal
/// variables, exists_left become conclusion existentials and the UVar
/// equations become conclusion pures.
GoalFile residual_goal(const Envs& envs, const Residual& r,
                       const std::vector<std::string>& uvar_names = {});

}  // namespace sepref
