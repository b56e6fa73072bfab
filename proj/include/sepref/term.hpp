#pragma once

// Reified syntax: pure expressions (Expr) and separation-logic assertions
// (Sexpr) over positional type/function/predicate environments.
//
// Variables use two independent contexts. Var n names position n of the
// regular-variable context and UVar n position n of the unification-variable
// context; binders append to the end of their context, so extending a context
// never changes the meaning of an existing term. Globals are nullary Funcs.

#include <compare>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sepref/value.hpp"

namespace sepref {

class Tvar {
 public:
  Tvar() = default;
  static Tvar prop() { return Tvar{}; }
  static Tvar type(std::size_t n) {
    Tvar t;
    t.index_ = n;
    return t;
  }

  bool is_prop() const { return !index_.has_value(); }
  std::size_t index() const { return *index_; }

  auto operator<=>(const Tvar&) const = default;

 private:
  std::optional<std::size_t> index_;
};

struct TypeDecl {
  std::string name;
  std::string eq_test;
  bool operator==(const TypeDecl&) const = default;
};

struct FuncSig {
  std::string name;
  std::vector<Tvar> domain;
  Tvar range;
  std::string interp;
  bool operator==(const FuncSig&) const = default;
};

struct PredSig {
  std::string name;
  std::vector<Tvar> domain;
  std::string interp;
  bool operator==(const PredSig&) const = default;
};

struct Envs {
  std::vector<TypeDecl> types;
  std::vector<FuncSig> funcs;
  std::vector<PredSig> preds;
  bool operator==(const Envs&) const = default;

  std::optional<std::size_t> find_func(std::string_view name) const;
  std::optional<std::size_t> find_pred(std::string_view name) const;
  std::optional<std::size_t> find_type(std::string_view name) const;
  /// First function whose interpretation identifier is `interp`.
  std::optional<std::size_t> func_by_interp(std::string_view interp) const;
  std::optional<std::size_t> pred_by_interp(std::string_view interp) const;
  /// Carrier of a sort; absent for an out-of-range or unregistered type.
  std::optional<Carrier> carrier(const Tvar& t) const;
};

class Expr {
 public:
  enum class Kind : std::uint8_t { Const, Var, UVar, Func, Equal };

  static Expr constant(Tvar t, Value v);
  static Expr var(std::size_t n);
  static Expr uvar(std::size_t n);
  static Expr func(std::size_t f, std::vector<Expr> args = {});
  static Expr equal(Tvar t, Expr lhs, Expr rhs);

  Kind kind() const;
  bool is(Kind k) const { return kind() == k; }
  /// Var/UVar position or Func symbol index.
  std::size_t index() const;
  /// Sort annotation of Const and Equal.
  const Tvar& type() const;
  const Value& literal() const;
  /// Func arguments; for Equal the two sides.
  std::span<const Expr> args() const;
  const Expr& lhs() const { return args()[0]; }
  const Expr& rhs() const { return args()[1]; }

  /// Exact structure, Const literals compared by value.
  friend bool operator==(const Expr& a, const Expr& b);

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

struct Expr::Node {
  Kind kind;
  std::size_t index = 0;
  Tvar type;
  Value literal;
  std::vector<Expr> args;
};

class Sexpr {
 public:
  enum class Kind : std::uint8_t { Star, Emp, Pred, Inj, Exists };

  static Sexpr star(Sexpr l, Sexpr r);
  static Sexpr emp();
  static Sexpr pred(std::size_t p, std::vector<Expr> args);
  static Sexpr inj(Expr e);
  /// `name` is a display hint for the binder; it does not take part in
  /// equality.
  static Sexpr exists(Tvar t, Sexpr body, std::string name = {});
  /// Right-nested Star of the parts; Emp when empty.
  static Sexpr star_all(std::vector<Sexpr> parts);

  Kind kind() const;
  bool is(Kind k) const { return kind() == k; }
  const Sexpr& left() const;
  const Sexpr& right() const;
  const Sexpr& body() const;
  std::size_t index() const;
  std::span<const Expr> args() const;
  const Expr& expr() const;
  const Tvar& type() const;
  const std::string& name() const;

  friend bool operator==(const Sexpr& a, const Sexpr& b);

 private:
  struct Node;
  explicit Sexpr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

struct Sexpr::Node {
  Kind kind;
  std::size_t index = 0;
  Tvar type;
  std::string name;
  std::vector<Expr> args;  // Pred arguments, or the single Inj expression
  std::vector<Sexpr> kids;  // Star: {l, r}; Exists: {body}
};

std::optional<Tvar> typecheck_expr(const Envs& envs, std::span<const Tvar> vars,
                                   std::span<const Tvar> uvars, const Expr& e);
bool typecheck_sexpr(const Envs& envs, std::span<const Tvar> vars,
                     std::span<const Tvar> uvars, const Sexpr& s);

/// Syntactic equality where Const leaves go through the type's registered
/// equality tester. Consts of distinct sorts are never equal.
bool expr_syntactic_eq(const Envs& envs, const Expr& a, const Expr& b);

/// Shift Var (resp. UVar) indices >= skip up by `by`.
Expr lift_expr(const Expr& e, std::size_t skip, std::size_t by);
Expr lift_uvars(const Expr& e, std::size_t skip, std::size_t by);
Sexpr lift_sexpr(const Sexpr& s, std::size_t skip, std::size_t by);

/// Rebuild `e` replacing every Var (resp. UVar) leaf by `f(index)`.
Expr map_vars(const Expr& e, const std::function<Expr(std::size_t)>& f);
Expr map_uvars(const Expr& e, const std::function<Expr(std::size_t)>& f);

bool mentions_var(const Expr& e, const std::function<bool(std::size_t)>& pred);
bool mentions_uvar(const Expr& e, const std::function<bool(std::size_t)>& pred);

struct OpenedExists {
  std::vector<Tvar> binders;
  std::vector<std::string> names;
  Sexpr body;
};

/// Strip the maximal Exists prefix.
OpenedExists open_exists(const Sexpr& s);

/// Total order: Const < Var < Func < Equal < UVar at each position, then
/// lexicographic on indices/literals and arguments.
std::strong_ordering expr_compare(const Expr& a, const Expr& b);
std::strong_ordering args_compare(std::span<const Expr> a, std::span<const Expr> b);

struct ExprLess {
  bool operator()(const Expr& a, const Expr& b) const { return expr_compare(a, b) < 0; }
};

}  // namespace sepref
