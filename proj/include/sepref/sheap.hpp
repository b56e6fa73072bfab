#pragma once

// Normalized heap assertions: the working form of refinement and
// cancellation.

#include <compare>
#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "sepref/term.hpp"

namespace sepref {

struct Atom {
  std::size_t pred;
  std::vector<Expr> args;
  bool operator==(const Atom&) const = default;
};

/// Star of all atoms and Inj of all pures, under an Exists prefix whose
/// binders occupy Var levels base .. base + exists.size() - 1.
struct SHeap {
  std::vector<Expr> pures;
  std::map<std::size_t, std::vector<std::vector<Expr>>> impures;
  std::vector<Tvar> exists;
  std::vector<std::string> exists_names;

  bool operator==(const SHeap&) const = default;

  std::size_t atom_count() const;
  /// Atoms in heap order: by predicate index, then insertion order.
  std::vector<Atom> atoms() const;
  void add_atom(std::size_t pred, std::vector<Expr> args);
  bool no_atoms() const { return atom_count() == 0; }
};

/// Flatten Star/Emp, hoist every Exists to the prefix, collect Inj into
/// pures and group atoms by predicate. `base` is the size of the ambient
/// regular-variable context.
SHeap normalize(const Sexpr& s, std::size_t base = 0);
Sexpr denormalize(const SHeap& h);

/// Apply `f` to every expression of the heap (pures and atom arguments).
SHeap map_exprs(const SHeap& h, const std::function<Expr(const Expr&)>& f);

/// Lexicographic order on atoms (predicate index, then arguments under
/// expr_compare), so unification variables sort last.
std::strong_ordering atom_order(const Atom& a, const Atom& b);

}  // namespace sepref
