#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>

#include "sepref/model.hpp"
#include "sepref/term.hpp"

namespace sepref {

/// Finite map from UVar index to Expr. Bindings are kept fully resolved:
/// no image mentions a bound UVar, so instantiation is a single pass.
class Subst {
 public:
  using Map = std::map<std::size_t, Expr>;

  bool empty() const { return map_.empty(); }
  std::size_t size() const { return map_.size(); }
  const Expr* lookup(std::size_t u) const;
  const Map& bindings() const { return map_; }

  /// Bind an unbound `u` to `e`. `e` is resolved first and every existing
  /// image mentioning `u` is rewritten. The caller guarantees `u` does not
  /// occur in `e` under this substitution.
  void bind(std::size_t u, const Expr& e);

  bool operator==(const Subst&) const = default;

 private:
  Map map_;
};

bool occurs(std::size_t u, const Expr& e, const Subst& s);

/// Replace every bound UVar by its image.
Expr instantiate(const Subst& s, const Expr& e);
Sexpr instantiate(const Subst& s, const Sexpr& e);

struct UnifyOptions {
  /// UVars below this index are rigid: they never receive a binding.
  std::size_t first_bindable = 0;
};

/// Single-pass, non-backtracking, left-to-right unification. Const leaves
/// are compared with the sort's registered tester, Vars unify only with the
/// identical Var. When both sides are unbound UVars the larger index is
/// bound to the smaller.
std::optional<Subst> expr_unify(const Envs& envs, const Expr& a, const Expr& b, const Subst& s,
                                const UnifyOptions& opts = {});
std::optional<Subst> args_unify(const Envs& envs, std::span<const Expr> a,
                                std::span<const Expr> b, const Subst& s,
                                const UnifyOptions& opts = {});

/// Every binding u -> e denotes equal values under the assignment.
bool subst_holds(const Envs& envs, const Interp& interp, std::span<const Binding> uvar_values,
                 const Subst& s, std::span<const Binding> var_values = {});

}  // namespace sepref
