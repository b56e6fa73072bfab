#pragma once

// Strongest-postcondition symbolic execution of straight-line blocks over a
// register/memory machine, parameterized by memory evaluators.

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sepref/cancel.hpp"
#include "sepref/hints.hpp"
#include "sepref/provers.hpp"
#include "sepref/sheap.hpp"
#include "sepref/term.hpp"
#include "sepref/trace.hpp"

namespace sepref {

/// Instruction expressions range over registers: Var k is register k.
struct Instr {
  enum class Kind { Assign, Read, Write, Assume };
  Kind kind;
  std::size_t reg = 0;  // Assign, Read
  Expr a;               // Assign: value; Read/Write: address; Assume: condition
  Expr b;               // Write: value; otherwise a copy of `a`

  static Instr assign(std::size_t reg, Expr e) { return {Kind::Assign, reg, e, e}; }
  static Instr read(std::size_t reg, Expr addr) { return {Kind::Read, reg, addr, addr}; }
  static Instr write(Expr addr, Expr val) { return {Kind::Write, 0, std::move(addr), std::move(val)}; }
  static Instr assume(Expr c) { return {Kind::Assume, 0, c, c}; }
};

struct SymState {
  /// Logical variables, known facts and the symbolic heap.
  UnfoldState state;
  /// Current value of each register over the logical variables.
  std::vector<Expr> regs;
};

struct MemEvaluator {
  using Read = std::function<std::optional<Expr>(const Envs&, const Prover&, const Facts&,
                                                 const SHeap&, const Expr& addr)>;
  using Write = std::function<std::optional<SHeap>(const Envs&, const Prover&, const Facts&,
                                                   const SHeap&, const Expr& addr,
                                                   const Expr& val)>;
  std::string name;
  Read sread;
  Write swrite;
};

/// Over atoms of predicates interpreted as `ptsto`: an address provably
/// equal to the atom's address reads/overwrites its value.
MemEvaluator ptsto_eval();
/// Over atoms of predicates interpreted as `array(ws, base)`: address
/// base + 4*i with i provably below len(ws) reads sel(ws, i) and writes
/// upd(ws, i, v).
MemEvaluator array_eval();
/// First-wins composition.
MemEvaluator compose_mem_evals(const MemEvaluator& m1, const MemEvaluator& m2);
/// Names: ptsto, array; `+`-separated lists compose left to right.
std::optional<MemEvaluator> make_mem_eval(std::string_view spec);

struct MemFault {
  std::size_t at;
};

/// Execute `prog`. Before a memory access the evaluator cannot justify, the
/// state is refined once with the forward lemmas of `db`; if the access is
/// still unjustified the result is MemFault at that instruction.
std::variant<SymState, MemFault> sym_exec(const Envs& envs, SymState st,
                                          const std::vector<Instr>& prog, const MemEvaluator& mev,
                                          const Prover& prover, const HintDatabase& db,
                                          std::size_t fuel, Trace* trace = nullptr);

struct Block {
  std::vector<Tvar> regs;
  std::vector<std::string> reg_names;
  std::vector<Tvar> uvars;
  /// Both typecheck with vars = regs; in `post` a register denotes its
  /// final value.
  Sexpr pre = Sexpr::emp();
  std::vector<Instr> prog;
  Sexpr post = Sexpr::emp();
};

struct ExecOutcome {
  std::variant<SymState, MemFault> result;
  /// Forward refinements applied to the precondition before execution.
  std::size_t applications = 0;
  /// On a fault, the state execution started from.
  std::optional<SymState> fault_state;
};

/// Open the precondition (registers and its existentials become logical
/// variables), refine it forward and execute the program.
ExecOutcome execute_block(const Envs& envs, const Block& block, const HintDatabase& db,
                          const MemEvaluator& mev, const Prover& prover, std::size_t fuel,
                          Trace* trace = nullptr);

struct VerifyResult {
  Residual residual;
  std::size_t applications = 0;
};

/// normalize(pre) -> forward refinement -> sym_exec -> backward refinement
/// of post -> cancel.
VerifyResult verify_block(const Envs& envs, const Block& block, const HintDatabase& db,
                          const MemEvaluator& mev, const Prover& prover, std::size_t fuel,
                          Trace* trace = nullptr);

}  // namespace sepref
