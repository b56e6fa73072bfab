#pragma once

// Pure-fact provers. A prover digests the known pure facts once
// (summarize) and then answers individual goals (prove). Answers are sound
// and incomplete: `false` only means "not shown".

#include <any>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sepref/term.hpp"

namespace sepref {

struct Facts {
  std::shared_ptr<const Envs> envs;
  std::vector<Expr> pures;
  std::any digest;
};

class Prover {
 public:
  class Impl {
   public:
    virtual ~Impl() = default;
    virtual std::any summarize(const Envs& envs, std::span<const Expr> pures) const = 0;
    virtual bool prove(const Envs& envs, const std::any& digest, const Expr& goal) const = 0;
  };

  Prover(std::string name, std::shared_ptr<const Impl> impl)
      : name_(std::move(name)), impl_(std::move(impl)) {}

  const std::string& name() const { return name_; }
  Facts summarize(const Envs& envs, std::span<const Expr> pures) const;
  bool prove(const Facts& facts, const Expr& goal) const;

 private:
  std::string name_;
  std::shared_ptr<const Impl> impl_;
};

/// Proves Equal(t, a, b) when a and b are syntactically equal.
Prover reflexivity_prover();
/// Proves goals that syntactically match a known fact.
Prover assumption_prover();
/// Difference constraints over 32-bit words: combines facts `a = b + k`
/// (k constant) in a union-find with offsets; proves `a = b + k` and
/// `ne(a, b + k)` goals, the latter also from a known `ne` fact shifted by
/// a common offset.
Prover word_prover();
/// Array bounds: proves `lt(i, len(e))` from a fact `lt(j, len(a))` when e
/// is a chain of `upd` over an array equal in length to a, and i is j or a
/// constant not above j.
Prover bounds_prover();
/// Sequence bounds: proves `all_lt(s, k)` and `all_gt(s, k)` for s = nil,
/// and for s = join(l, k2, r) when both halves and the key `lt` relation
/// follow recursively or are facts.
Prover order_prover();
/// Disjunction: a goal holds if either component proves it.
Prover compose_provers(const Prover& p1, const Prover& p2);

/// Names: reflexivity, assumption, word, bounds, order, default (all five). A
/// `+`-separated list composes left to right. Absent for an unknown name.
std::optional<Prover> make_prover(std::string_view spec);

struct Obligation {
  Tvar type;
  Expr lhs;
  Expr rhs;
  bool operator==(const Obligation&) const = default;
};

/// Descend through matching Func heads (and Equal nodes); return the
/// residual pairs whose equality implies equality of a and b.
std::vector<Obligation> congruence_split(const Envs& envs, const Expr& a, const Expr& b,
                                         const Tvar& t);

}  // namespace sepref
