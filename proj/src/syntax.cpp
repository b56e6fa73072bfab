#include "sepref/syntax.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace sepref {

ParseError::ParseError(std::size_t line, std::size_t col, const std::string& msg)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
      line_(line),
      col_(col) {}

namespace {

// ---------------------------------------------------------------- lexing

enum class Tok {
  LParen, RParen, LBrack, RBrack, LPure, RPure, Comma, Star, Dot, Colon, Question, Arrow,
  Op, Number, Ident, String, End
};

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
  std::size_t col;
};

std::string describe(const Token& t) {
  if (t.kind == Tok::End) return "end of input";
  if (t.kind == Tok::String) return "\"" + t.text + "\"";
  return "'" + t.text + "'";
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0, line = 1, col = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  auto push = [&](Tok k, std::size_t n) {
    out.push_back({k, std::string(src.substr(i, n)), line, col});
    advance(n);
  };
  while (i < src.size()) {
    const char c = src[i];
    const std::string_view rest = src.substr(i);
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
    } else if (c == ';') {
      while (i < src.size() && src[i] != '\n') advance(1);
    } else if (rest.starts_with("===>")) {
      push(Tok::Arrow, 4);
    } else if (rest.starts_with("[|")) {
      push(Tok::LPure, 2);
    } else if (rest.starts_with("|]")) {
      push(Tok::RPure, 2);
    } else if (rest.starts_with("<=") || rest.starts_with("!=")) {
      push(Tok::Op, 2);
    } else if (c == '+' || c == '-' || c == '<' || c == '=') {
      push(Tok::Op, 1);
    } else if (c == '(') {
      push(Tok::LParen, 1);
    } else if (c == ')') {
      push(Tok::RParen, 1);
    } else if (c == '[') {
      push(Tok::LBrack, 1);
    } else if (c == ']') {
      push(Tok::RBrack, 1);
    } else if (c == ',') {
      push(Tok::Comma, 1);
    } else if (c == '*') {
      push(Tok::Star, 1);
    } else if (c == '.') {
      push(Tok::Dot, 1);
    } else if (c == ':') {
      push(Tok::Colon, 1);
    } else if (c == '?') {
      push(Tok::Question, 1);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t n = 0;
      while (n < rest.size() && std::isdigit(static_cast<unsigned char>(rest[n]))) ++n;
      push(Tok::Number, n);
    } else if (ident_start(c)) {
      std::size_t n = 0;
      while (n < rest.size() && ident_char(rest[n])) ++n;
      push(Tok::Ident, n);
    } else if (c == '"') {
      const std::size_t l = line, k = col;
      std::size_t n = 1;
      while (n < rest.size() && rest[n] != '"' && rest[n] != '\n') ++n;
      if (n == rest.size() || rest[n] != '"') throw ParseError(l, k, "unterminated string");
      out.push_back({Tok::String, std::string(rest.substr(1, n - 1)), l, k});
      advance(n + 1);
    } else {
      throw ParseError(line, col, std::string("unexpected character '") + c + "'");
    }
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

// ------------------------------------------------------- untyped expressions

struct PExpr {
  enum class Kind { Num, BoolLit, List, Ident, UVar, Call, Infix };
  Kind kind;
  std::string text;  // number, identifier, uvar name/index, function or operator name
  std::vector<PExpr> args;
  std::optional<std::string> annot;
  std::size_t annot_line = 0, annot_col = 0;
  std::size_t line = 0, col = 0;
};

bool is_literal(const PExpr& p) {
  return p.kind == PExpr::Kind::Num || p.kind == PExpr::Kind::List ||
         (p.kind == PExpr::Kind::BoolLit && p.annot);
}

int infix_prec(std::string_view op) {
  if (op == "=" || op == "!=" || op == "<" || op == "<=") return 1;
  if (op == "+" || op == "-") return 2;
  return 0;
}

const std::set<std::string, std::less<>>& keywords() {
  static const std::set<std::string, std::less<>> k{"emp", "EX", "true", "false", "Prop"};
  return k;
}

bool valid_ident(std::string_view s) {
  if (s.empty() || !ident_start(s[0])) return false;
  return std::all_of(s.begin(), s.end(), ident_char);
}

// ------------------------------------------------------------ rendering

std::string type_name(const Envs& envs, const Tvar& t) {
  if (t.is_prop()) return "Prop";
  if (t.index() < envs.types.size()) return envs.types[t.index()].name;
  return "t" + std::to_string(t.index());
}

bool func_named(const Envs& envs, std::string_view name) {
  return std::any_of(envs.funcs.begin(), envs.funcs.end(),
                     [&](const FuncSig& f) { return f.name == name; });
}

// Pick a display name for a new binder that neither shadows an in-scope name
// nor a function.
std::string fresh_name(const Envs& envs, const std::vector<std::string>& scope,
                       const std::string& hint) {
  const std::string base = valid_ident(hint) ? hint : "v";
  auto taken = [&](const std::string& n) {
    return keywords().count(n) || func_named(envs, n) ||
           std::find(scope.begin(), scope.end(), n) != scope.end();
  };
  if (!taken(base)) return base;
  for (std::size_t k = 1;; ++k) {
    std::string cand = base + std::to_string(k);
    if (!taken(cand)) return cand;
  }
}

std::vector<std::string> display_names(const Envs& envs, const std::vector<std::string>& names) {
  std::vector<std::string> out;
  for (const auto& n : names) out.push_back(fresh_name(envs, out, n));
  return out;
}

std::string literal_text(const Value& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Word> || std::is_same_v<T, Nat>) {
          return std::to_string(x.v);
        } else if constexpr (std::is_same_v<T, Bool> || std::is_same_v<T, PropV>) {
          return x.v ? "true" : "false";
        } else {
          std::string s = "[";
          for (std::size_t i = 0; i < x.ws.size(); ++i)
            s += (i ? ", " : "") + std::to_string(x.ws[i]);
          return s + "]";
        }
      },
      v);
}

struct Renderer {
  const Envs& envs;

  std::string constant(const Expr& e, bool annotate) const {
    std::string s = literal_text(e.literal());
    const Carrier c = carrier_of(e.literal());
    if ((c == Carrier::Bool || c == Carrier::Prop) && func_named(envs, s)) annotate = true;
    if (annotate) s += ":" + type_name(envs, e.type());
    return s;
  }

  std::string expr(const Expr& e, const std::vector<std::string>& names, int min_prec) const {
    std::string s;
    int prec = 3;
    switch (e.kind()) {
      case Expr::Kind::Const: s = constant(e, false); break;
      case Expr::Kind::Var:
        s = e.index() < names.size() ? names[e.index()] : "v" + std::to_string(e.index());
        break;
      case Expr::Kind::UVar: s = "?" + std::to_string(e.index()); break;
      case Expr::Kind::Equal: {
        const bool both = e.lhs().is(Expr::Kind::Const) && e.rhs().is(Expr::Kind::Const);
        const std::string l = e.lhs().is(Expr::Kind::Const) ? constant(e.lhs(), both)
                                                            : expr(e.lhs(), names, 2);
        s = l + " = " + expr(e.rhs(), names, 2);
        prec = 1;
        break;
      }
      case Expr::Kind::Func: {
        const FuncSig& f = envs.funcs[e.index()];
        const int p = infix_prec(f.name);
        if (p && e.args().size() == 2) {
          s = expr(e.args()[0], names, p) + " " + f.name + " " +
              expr(e.args()[1], names, p == 1 ? 2 : 3);
          prec = p;
        } else if (e.args().empty()) {
          s = f.name;
        } else {
          s = f.name + "(";
          for (std::size_t i = 0; i < e.args().size(); ++i)
            s += (i ? ", " : "") + expr(e.args()[i], names, 0);
          s += ")";
        }
        break;
      }
    }
    return prec < min_prec ? "(" + s + ")" : s;
  }

  std::string args(std::span<const Expr> as, const std::vector<std::string>& names) const {
    std::string s = "(";
    for (std::size_t i = 0; i < as.size(); ++i) s += (i ? ", " : "") + expr(as[i], names, 0);
    return s + ")";
  }

  // `left`: the assertion is the left operand of a Star.
  std::string sexpr(const Sexpr& s, std::vector<std::string>& names, bool left) const {
    switch (s.kind()) {
      case Sexpr::Kind::Emp: return "emp";
      case Sexpr::Kind::Inj: return "[| " + expr(s.expr(), names, 0) + " |]";
      case Sexpr::Kind::Pred: return envs.preds[s.index()].name + args(s.args(), names);
      case Sexpr::Kind::Star: {
        std::string out = sexpr(s.left(), names, true) + " * " + sexpr(s.right(), names, false);
        return left ? "(" + out + ")" : out;
      }
      case Sexpr::Kind::Exists: {
        const std::string n = fresh_name(envs, names, s.name());
        names.push_back(n);
        std::string out =
            "EX " + n + ":" + type_name(envs, s.type()) + ". " + sexpr(s.body(), names, false);
        names.pop_back();
        return left ? "(" + out + ")" : out;
      }
    }
    return {};
  }
};

// ------------------------------------------------------------- parsing

struct Binder {
  std::string name;
  Tvar type;
};

class Parser {
 public:
  Parser(std::string_view text, const Envs& envs) : toks_(lex(text)), envs_(&envs) {}

  void set_envs(const Envs& envs) { envs_ = &envs; }
  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool at(Tok k) const { return peek().kind == k; }
  bool at(Tok k, std::string_view text) const { return at(k) && peek().text == text; }
  Token take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  [[noreturn]] void fail(const std::string& what) const { fail_at(peek(), what); }
  [[noreturn]] static void fail_at(const Token& t, const std::string& what) {
    throw ParseError(t.line, t.col, "expected " + what + ", found " + describe(t));
  }
  [[noreturn]] static void error_at(std::size_t line, std::size_t col, const std::string& msg) {
    throw ParseError(line, col, msg);
  }

  Token expect(Tok k, const std::string& what) {
    if (!at(k)) fail(what);
    return take();
  }
  Token expect(Tok k, std::string_view text, const std::string& what) {
    if (!at(k, text)) fail(what);
    return take();
  }
  bool accept(Tok k) {
    if (!at(k)) return false;
    take();
    return true;
  }

  // Sorts.
  Tvar sort() {
    const Token t = expect(Tok::Ident, "a sort");
    if (t.text == "Prop") return Tvar::prop();
    auto idx = envs_->find_type(t.text);
    if (!idx) error_at(t.line, t.col, "unknown sort '" + t.text + "'");
    return Tvar::type(*idx);
  }

  // Untyped expressions.
  PExpr pexpr() {
    PExpr l = additive();
    if (at(Tok::Op) && infix_prec(peek().text) == 1) {
      const Token op = take();
      PExpr r = additive();
      return PExpr{PExpr::Kind::Infix, op.text, {std::move(l), std::move(r)}, {}, 0, 0,
                   op.line, op.col};
    }
    return l;
  }

  PExpr additive() {
    PExpr l = primary();
    while (at(Tok::Op) && infix_prec(peek().text) == 2) {
      const Token op = take();
      PExpr r = primary();
      l = PExpr{PExpr::Kind::Infix, op.text, {std::move(l), std::move(r)}, {}, 0, 0,
                op.line, op.col};
    }
    return l;
  }

  void annotation(PExpr& p) {
    if (!at(Tok::Colon)) return;
    take();
    const Token t = expect(Tok::Ident, "a sort");
    p.annot = t.text;
    p.annot_line = t.line;
    p.annot_col = t.col;
  }

  PExpr primary() {
    const Token t = peek();
    PExpr p{PExpr::Kind::Num, "", {}, {}, 0, 0, t.line, t.col};
    switch (t.kind) {
      case Tok::Number:
        take();
        p.text = t.text;
        annotation(p);
        return p;
      case Tok::LBrack:
        take();
        p.kind = PExpr::Kind::List;
        if (!at(Tok::RBrack)) {
          do {
            const Token n = expect(Tok::Number, "a number");
            p.args.push_back(PExpr{PExpr::Kind::Num, n.text, {}, {}, 0, 0, n.line, n.col});
          } while (accept(Tok::Comma));
        }
        expect(Tok::RBrack, "']'");
        annotation(p);
        return p;
      case Tok::Question: {
        take();
        p.kind = PExpr::Kind::UVar;
        if (at(Tok::Number) || at(Tok::Ident))
          p.text = take().text;
        else
          fail("a unification variable index or name");
        return p;
      }
      case Tok::LParen: {
        take();
        PExpr inner = pexpr();
        expect(Tok::RParen, "')'");
        return inner;
      }
      case Tok::Ident:
      case Tok::Op: {
        if (t.kind == Tok::Op && !at_call()) fail("an expression");
        take();
        p.text = t.text;
        if ((t.text == "true" || t.text == "false") && t.kind == Tok::Ident) {
          p.kind = PExpr::Kind::BoolLit;
          annotation(p);
          if (p.annot) return p;
        }
        if (accept(Tok::LParen)) {
          p.kind = PExpr::Kind::Call;
          if (!at(Tok::RParen)) {
            do p.args.push_back(pexpr());
            while (accept(Tok::Comma));
          }
          expect(Tok::RParen, "')'");
          return p;
        }
        if (p.kind != PExpr::Kind::BoolLit) p.kind = PExpr::Kind::Ident;
        return p;
      }
      default: fail("an expression");
    }
  }

  // An operator used in prefix call form, e.g. `+(a, b)`.
  bool at_call() const { return peek().kind == Tok::Op && peek(1).kind == Tok::LParen; }

  // Typed elaboration.
  struct Ctx {
    const std::vector<Binder>* vars;
    const Scope* scope;
  };

  Tvar annot_sort(const PExpr& p) const {
    if (*p.annot == "Prop") return Tvar::prop();
    auto idx = envs_->find_type(*p.annot);
    if (!idx) error_at(p.annot_line, p.annot_col, "unknown sort '" + *p.annot + "'");
    return Tvar::type(*idx);
  }

  std::string sort_name(const Tvar& t) const { return type_name(*envs_, t); }

  void check_sort(const PExpr& p, const Tvar& got, const std::optional<Tvar>& expected) const {
    if (expected && *expected != got)
      error_at(p.line, p.col,
               "expected sort " + sort_name(*expected) + ", found " + sort_name(got));
  }

  [[noreturn]] void literal_mismatch(const PExpr& p, const Tvar& t) const {
    error_at(p.line, p.col, "literal does not fit sort " + sort_name(t));
  }

  std::pair<Expr, Tvar> literal(const PExpr& p, std::optional<Tvar> expected) const {
    std::optional<Tvar> t = p.annot ? std::optional<Tvar>(annot_sort(p)) : expected;
    if (p.annot) check_sort(p, *t, expected);
    if (!t) error_at(p.line, p.col, "cannot infer the sort of literal '" + p.text +
                                        "'; annotate it as literal:sort");
    const auto carrier = t->is_prop() ? std::optional<Carrier>(Carrier::Prop) : envs_->carrier(*t);
    if (!carrier) literal_mismatch(p, *t);
    auto number = [&](const PExpr& n) -> std::uint64_t {
      try {
        return std::stoull(n.text);
      } catch (...) {
        error_at(n.line, n.col, "number out of range");
      }
    };
    switch (p.kind) {
      case PExpr::Kind::Num:
        if (*carrier == Carrier::Word) {
          const auto v = number(p);
          if (v > 0xffffffffull) error_at(p.line, p.col, "word literal out of range");
          return {Expr::constant(*t, Word{static_cast<std::uint32_t>(v)}), *t};
        }
        if (*carrier == Carrier::Nat) return {Expr::constant(*t, Nat{number(p)}), *t};
        literal_mismatch(p, *t);
      case PExpr::Kind::BoolLit:
        if (*carrier == Carrier::Bool) return {Expr::constant(*t, Bool{p.text == "true"}), *t};
        if (*carrier == Carrier::Prop) return {Expr::constant(*t, PropV{p.text == "true"}), *t};
        literal_mismatch(p, *t);
      case PExpr::Kind::List: {
        if (*carrier != Carrier::WordSeq) literal_mismatch(p, *t);
        WordSeq ws;
        for (const PExpr& n : p.args) {
          const auto v = number(n);
          if (v > 0xffffffffull) error_at(n.line, n.col, "word literal out of range");
          ws.ws.push_back(static_cast<std::uint32_t>(v));
        }
        return {Expr::constant(*t, ws), *t};
      }
      default: literal_mismatch(p, *t);
    }
  }

  std::string sig_text(const FuncSig& f) const {
    std::string s = "(func " + f.name + " (";
    for (std::size_t i = 0; i < f.domain.size(); ++i) s += (i ? " " : "") + sort_name(f.domain[i]);
    return s + ") " + sort_name(f.range) + (f.interp.empty() ? "" : " " + f.interp) + ")";
  }

  std::pair<Expr, Tvar> call(const PExpr& p, std::size_t fi, const std::vector<PExpr>& args,
                             const Ctx& ctx, std::optional<Tvar> expected) const {
    const FuncSig& f = envs_->funcs[fi];
    if (args.size() != f.domain.size())
      error_at(p.line, p.col,
               "'" + f.name + "' expects " + std::to_string(f.domain.size()) + " argument" +
                   (f.domain.size() == 1 ? "" : "s") + ", found " + std::to_string(args.size()) +
                   "; declared as " + sig_text(f));
    std::vector<Expr> out;
    for (std::size_t i = 0; i < args.size(); ++i)
      out.push_back(elab(args[i], ctx, f.domain[i]).first);
    check_sort(p, f.range, expected);
    return {Expr::func(fi, std::move(out)), f.range};
  }

  std::pair<Expr, Tvar> elab(const PExpr& p, const Ctx& ctx, std::optional<Tvar> expected) const {
    switch (p.kind) {
      case PExpr::Kind::Num:
      case PExpr::Kind::List: return literal(p, expected);
      case PExpr::Kind::BoolLit:
        if (p.annot || !envs_->find_func(p.text)) return literal(p, expected);
        [[fallthrough]];
      case PExpr::Kind::Ident: {
        const auto& vars = *ctx.vars;
        for (std::size_t i = vars.size(); i-- > 0;)
          if (vars[i].name == p.text) {
            check_sort(p, vars[i].type, expected);
            return {Expr::var(i), vars[i].type};
          }
        if (auto fi = envs_->find_func(p.text)) return call(p, *fi, {}, ctx, expected);
        error_at(p.line, p.col, "unknown name '" + p.text + "'");
      }
      case PExpr::Kind::UVar: {
        const Scope& sc = *ctx.scope;
        std::optional<std::size_t> idx;
        if (std::isdigit(static_cast<unsigned char>(p.text[0]))) {
          idx = std::stoull(p.text);
        } else {
          auto it = std::find(sc.uvar_names.begin(), sc.uvar_names.end(), p.text);
          if (it != sc.uvar_names.end()) idx = static_cast<std::size_t>(it - sc.uvar_names.begin());
        }
        if (!idx || *idx >= sc.uvars.size())
          error_at(p.line, p.col, "undeclared unification variable '?" + p.text + "'");
        check_sort(p, sc.uvars[*idx], expected);
        return {Expr::uvar(*idx), sc.uvars[*idx]};
      }
      case PExpr::Kind::Call: {
        auto fi = envs_->find_func(p.text);
        if (!fi) error_at(p.line, p.col, "unknown function '" + p.text + "'");
        return call(p, *fi, p.args, ctx, expected);
      }
      case PExpr::Kind::Infix: {
        if (p.text == "=") {
          check_sort(p, Tvar::prop(), expected);
          const PExpr& l = p.args[0];
          const PExpr& r = p.args[1];
          if (is_literal(l) && !l.annot && !(is_literal(r) && !r.annot)) {
            auto [re, rt] = elab(r, ctx, std::nullopt);
            auto [le, lt] = elab(l, ctx, rt);
            return {Expr::equal(rt, le, re), Tvar::prop()};
          }
          auto [le, lt] = elab(l, ctx, std::nullopt);
          auto [re, rt] = elab(r, ctx, lt);
          return {Expr::equal(lt, le, re), Tvar::prop()};
        }
        auto fi = envs_->find_func(p.text);
        if (!fi) error_at(p.line, p.col, "no function declared for operator '" + p.text + "'");
        return call(p, *fi, p.args, ctx, expected);
      }
    }
    error_at(p.line, p.col, "malformed expression");
  }

  Expr expr(std::vector<Binder>& vars, const Scope& scope, std::optional<Tvar> expected) {
    const PExpr p = pexpr();
    return elab(p, Ctx{&vars, &scope}, expected).first;
  }

  // Assertions.
  Sexpr sexpr(std::vector<Binder>& vars, const Scope& scope) {
    Sexpr l = sterm(vars, scope);
    if (accept(Tok::Star)) return Sexpr::star(l, sexpr(vars, scope));
    return l;
  }

  Sexpr sterm(std::vector<Binder>& vars, const Scope& scope) {
    const Token t = peek();
    if (t.kind == Tok::Ident && t.text == "emp") {
      take();
      return Sexpr::emp();
    }
    if (t.kind == Tok::Ident && t.text == "EX") {
      take();
      const Token n = expect(Tok::Ident, "a binder name");
      if (keywords().count(n.text)) fail_at(n, "a binder name");
      expect(Tok::Colon, "':'");
      const Tvar ty = sort();
      expect(Tok::Dot, "'.'");
      vars.push_back({n.text, ty});
      Sexpr body = sexpr(vars, scope);
      vars.pop_back();
      return Sexpr::exists(ty, body, n.text);
    }
    if (t.kind == Tok::LPure) {
      take();
      Expr e = expr(vars, scope, Tvar::prop());
      expect(Tok::RPure, "'|]'");
      return Sexpr::inj(e);
    }
    if (t.kind == Tok::LParen) {
      take();
      Sexpr s = sexpr(vars, scope);
      expect(Tok::RParen, "')'");
      return s;
    }
    if (t.kind == Tok::Ident) {
      take();
      auto pi = envs_->find_pred(t.text);
      if (!pi) error_at(t.line, t.col, "unknown predicate '" + t.text + "'");
      const PredSig& sig = envs_->preds[*pi];
      std::vector<PExpr> args;
      if (accept(Tok::LParen)) {
        if (!at(Tok::RParen)) {
          do args.push_back(pexpr());
          while (accept(Tok::Comma));
        }
        expect(Tok::RParen, "')'");
      }
      if (args.size() != sig.domain.size()) {
        std::string decl = "(pred " + sig.name + " (";
        for (std::size_t i = 0; i < sig.domain.size(); ++i)
          decl += (i ? " " : "") + sort_name(sig.domain[i]);
        decl += ") " + sig.interp + ")";
        error_at(t.line, t.col,
                 "'" + sig.name + "' expects " + std::to_string(sig.domain.size()) +
                     " argument" + (sig.domain.size() == 1 ? "" : "s") + ", found " +
                     std::to_string(args.size()) + "; declared as " + decl);
      }
      std::vector<Expr> out;
      for (std::size_t i = 0; i < args.size(); ++i)
        out.push_back(elab(args[i], Ctx{&vars, &scope}, sig.domain[i]).first);
      return Sexpr::pred(*pi, std::move(out));
    }
    fail("an assertion");
  }

  void end() {
    if (!at(Tok::End)) fail("end of input");
  }

  // Declaration names may be identifiers or infix operators.
  Token decl_name() {
    if (at(Tok::Ident) || at(Tok::Op)) {
      if (at(Tok::Op, "=")) fail("a name ('=' is reserved)");
      return take();
    }
    fail("a name");
  }

  std::vector<Tvar> sort_list() {
    expect(Tok::LParen, "'('");
    std::vector<Tvar> out;
    while (!at(Tok::RParen)) out.push_back(sort());
    take();
    return out;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const Envs* envs_;
};

std::vector<Binder> binders_of(const Scope& s) {
  std::vector<Binder> out;
  for (std::size_t i = 0; i < s.vars.size(); ++i)
    out.push_back({i < s.var_names.size() ? s.var_names[i] : "", s.vars[i]});
  return out;
}

// Shared handling of `(type ...)`, `(func ...)`, `(pred ...)` bodies after
// the keyword (and optional position).
TypeDecl type_body(Parser& p) {
  const Token n = p.expect(Tok::Ident, "a type name");
  const Token eq = p.expect(Tok::Ident, "an equality tester");
  if (!find_eq_test(eq.text))
    Parser::error_at(eq.line, eq.col, "unknown equality tester '" + eq.text + "'");
  return {n.text, eq.text};
}

FuncSig func_body(Parser& p) {
  const Token n = p.decl_name();
  FuncSig f{n.text, p.sort_list(), {}, {}};
  f.range = p.sort();
  if (p.at(Tok::Ident))
    f.interp = p.take().text;
  else if (f.domain.empty())
    f.interp = std::string(kFreeInterp);
  else
    p.fail("an interpretation name");
  return f;
}

PredSig pred_body(Parser& p) {
  const Token n = p.expect(Tok::Ident, "a predicate name");
  PredSig s{n.text, p.sort_list(), {}};
  s.interp = p.expect(Tok::Ident, "an interpretation name").text;
  return s;
}

std::string render_func_decl(const Envs& envs, const FuncSig& f, const std::string& pos) {
  std::string s = "(func " + pos + f.name + " (";
  for (std::size_t i = 0; i < f.domain.size(); ++i)
    s += (i ? " " : "") + type_name(envs, f.domain[i]);
  s += ") " + type_name(envs, f.range);
  if (!(f.domain.empty() && f.interp == kFreeInterp)) s += " " + f.interp;
  return s + ")";
}

std::string render_pred_decl(const Envs& envs, const PredSig& p, const std::string& pos) {
  std::string s = "(pred " + pos + p.name + " (";
  for (std::size_t i = 0; i < p.domain.size(); ++i)
    s += (i ? " " : "") + type_name(envs, p.domain[i]);
  return s + ") " + p.interp + ")";
}

std::string render_instr(const Envs& envs, const Instr& ins, const std::vector<std::string>& names) {
  Renderer r{envs};
  const std::string reg = ins.reg < names.size() ? names[ins.reg] : "v" + std::to_string(ins.reg);
  switch (ins.kind) {
    case Instr::Kind::Assign: return "(assign " + reg + " " + r.expr(ins.a, names, 0) + ")";
    case Instr::Kind::Read: return "(read " + reg + " " + r.expr(ins.a, names, 0) + ")";
    case Instr::Kind::Write:
      return "(write " + r.expr(ins.a, names, 0) + ", " + r.expr(ins.b, names, 0) + ")";
    case Instr::Kind::Assume: return "(assume " + r.expr(ins.a, names, 0) + ")";
  }
  return {};
}

// Add a declaration to a goal environment: identical redeclarations of
// names provided by `base` are skipped, conflicting ones rejected.
template <class T>
void declare(std::vector<T>& env, std::size_t base_size, const T& decl, const Token& at,
             const char* what) {
  for (std::size_t i = 0; i < env.size(); ++i) {
    if (env[i].name != decl.name || decl.name == "_") continue;
    if (i < base_size && env[i] == decl) return;
    Parser::error_at(at.line, at.col,
                     std::string("conflicting declaration of ") + what + " '" + decl.name + "'");
  }
  env.push_back(decl);
}

}  // namespace

// ------------------------------------------------------------ public API

std::string render_type(const Envs& envs, const Tvar& t) { return type_name(envs, t); }

std::string render_expr(const Envs& envs, const Expr& e, const std::vector<std::string>& var_names) {
  return Renderer{envs}.expr(e, display_names(envs, var_names), 0);
}

std::string render_sexpr(const Envs& envs, const Sexpr& s,
                         const std::vector<std::string>& var_names) {
  std::vector<std::string> names = display_names(envs, var_names);
  return Renderer{envs}.sexpr(s, names, false);
}

std::string render_atom(const Envs& envs, const Atom& a, const std::vector<std::string>& var_names) {
  std::vector<std::string> names = display_names(envs, var_names);
  return Renderer{envs}.sexpr(Sexpr::pred(a.pred, a.args), names, false);
}

std::string render_heap(const Envs& envs, const SHeap& h, const std::vector<std::string>& var_names) {
  return render_sexpr(envs, denormalize(h), var_names);
}

Expr parse_expr(const Envs& envs, std::string_view text, const Scope& scope,
                std::optional<Tvar> expected) {
  Parser p(text, envs);
  std::vector<Binder> vars = binders_of(scope);
  Expr e = p.expr(vars, scope, expected);
  p.end();
  return e;
}

Sexpr parse_sexpr(const Envs& envs, std::string_view text, const Scope& scope) {
  Parser p(text, envs);
  std::vector<Binder> vars = binders_of(scope);
  Sexpr s = p.sexpr(vars, scope);
  p.end();
  return s;
}

Block GoalFile::block() const {
  Block b;
  b.regs = vars;
  b.reg_names = var_names;
  b.uvars = uvars;
  b.pre = lhs;
  b.prog = prog;
  b.post = rhs;
  return b;
}

GoalFile parse_goal(std::string_view text, const Envs& base) {
  GoalFile g;
  g.envs = base;
  const std::size_t nt = base.types.size(), nf = base.funcs.size(), np = base.preds.size();
  Parser p(text, g.envs);
  Scope scope;
  bool have_entail = false, have_program = false;
  bool have_pre = false, have_post = false, have_prog = false;

  auto var_index = [&](const Token& t) {
    auto it = std::find(g.var_names.begin(), g.var_names.end(), t.text);
    if (it == g.var_names.end()) Parser::error_at(t.line, t.col, "unknown register '" + t.text + "'");
    return static_cast<std::size_t>(it - g.var_names.begin());
  };

  while (!p.at(Tok::End)) {
    p.expect(Tok::LParen, "'('");
    const Token kw = p.expect(Tok::Ident, "a declaration keyword");
    std::vector<Binder> vars = binders_of(scope);
    if (kw.text == "type") {
      declare(g.envs.types, nt, type_body(p), kw, "type");
    } else if (kw.text == "func") {
      declare(g.envs.funcs, nf, func_body(p), kw, "function");
    } else if (kw.text == "pred") {
      declare(g.envs.preds, np, pred_body(p), kw, "predicate");
    } else if (kw.text == "var") {
      const Token n = p.expect(Tok::Ident, "a variable name");
      if (keywords().count(n.text) ||
          std::find(g.var_names.begin(), g.var_names.end(), n.text) != g.var_names.end())
        Parser::error_at(n.line, n.col, "invalid or duplicate variable name '" + n.text + "'");
      g.var_names.push_back(n.text);
      g.vars.push_back(p.sort());
    } else if (kw.text == "uvar") {
      std::string name;
      if (p.at(Tok::Ident) && p.peek(1).kind == Tok::Ident) name = p.take().text;
      g.uvar_names.push_back(name);
      g.uvars.push_back(p.sort());
    } else if (kw.text == "entail") {
      if (have_entail || have_program) Parser::fail_at(kw, "a single goal");
      scope = Scope{g.var_names, g.vars, g.uvar_names, g.uvars};
      vars = binders_of(scope);
      g.lhs = p.sexpr(vars, scope);
      p.expect(Tok::Arrow, "'===>'");
      g.rhs = p.sexpr(vars, scope);
      have_entail = true;
    } else if (kw.text == "pre" || kw.text == "post") {
      if (have_entail) Parser::fail_at(kw, "a single goal");
      bool& seen = kw.text == "pre" ? have_pre : have_post;
      if (seen) Parser::error_at(kw.line, kw.col, "duplicate (" + kw.text + " ...)");
      seen = true;
      scope = Scope{g.var_names, g.vars, g.uvar_names, g.uvars};
      vars = binders_of(scope);
      (kw.text == "pre" ? g.lhs : g.rhs) = p.sexpr(vars, scope);
      have_program = true;
    } else if (kw.text == "prog") {
      if (have_entail) Parser::fail_at(kw, "a single goal");
      if (have_prog) Parser::error_at(kw.line, kw.col, "duplicate (prog ...)");
      have_prog = have_program = true;
      scope = Scope{g.var_names, g.vars, g.uvar_names, g.uvars};
      vars = binders_of(scope);
      while (p.accept(Tok::LParen)) {
        const Token op = p.expect(Tok::Ident, "an instruction");
        if (op.text == "assign" || op.text == "read") {
          const std::size_t r = var_index(p.expect(Tok::Ident, "a register"));
          if (op.text == "assign")
            g.prog.push_back(Instr::assign(r, p.expr(vars, scope, g.vars[r])));
          else
            g.prog.push_back(Instr::read(r, p.expr(vars, scope, std::nullopt)));
        } else if (op.text == "write") {
          Expr a = p.expr(vars, scope, std::nullopt);
          p.accept(Tok::Comma);
          Expr v = p.expr(vars, scope, std::nullopt);
          g.prog.push_back(Instr::write(a, v));
        } else if (op.text == "assume") {
          g.prog.push_back(Instr::assume(p.expr(vars, scope, Tvar::prop())));
        } else {
          Parser::fail_at(op, "assign, read, write or assume");
        }
        p.expect(Tok::RParen, "')'");
      }
    } else {
      Parser::fail_at(kw, "type, func, pred, var, uvar, entail, pre, prog or post");
    }
    p.expect(Tok::RParen, "')'");
  }
  if (!have_entail && !have_program) p.fail("(entail ...) or (pre ...)");
  g.is_program = have_program;
  return g;
}

std::string render_goal(const GoalFile& g) {
  std::ostringstream out;
  const Envs& envs = g.envs;
  for (const TypeDecl& t : envs.types) out << "(type " << t.name << " " << t.eq_test << ")\n";
  for (const FuncSig& f : envs.funcs) out << render_func_decl(envs, f, "") << "\n";
  for (const PredSig& p : envs.preds) out << render_pred_decl(envs, p, "") << "\n";
  const std::vector<std::string> names = display_names(envs, g.var_names);
  for (std::size_t i = 0; i < g.vars.size(); ++i)
    out << "(var " << names[i] << " " << type_name(envs, g.vars[i]) << ")\n";
  for (std::size_t i = 0; i < g.uvars.size(); ++i) {
    const bool named = i < g.uvar_names.size() && valid_ident(g.uvar_names[i]);
    out << "(uvar " << (named ? g.uvar_names[i] + " " : "") << type_name(envs, g.uvars[i]) << ")\n";
  }
  if (!g.is_program) {
    out << "(entail " << render_sexpr(envs, g.lhs, names) << "\n  ===> "
        << render_sexpr(envs, g.rhs, names) << ")\n";
  } else {
    out << "(pre " << render_sexpr(envs, g.lhs, names) << ")\n";
    out << "(prog";
    for (const Instr& ins : g.prog) out << "\n  " << render_instr(envs, ins, names);
    out << ")\n";
    out << "(post " << render_sexpr(envs, g.rhs, names) << ")\n";
  }
  return out.str();
}

HintDatabase parse_hints(std::string_view text) {
  HintDatabase db;
  Envs envs;
  Parser p(text, envs);
  std::optional<std::pair<std::string, Token>> bounds_text;

  auto position = [&](std::size_t next) -> std::size_t {
    if (!p.at(Tok::Number)) return next;
    return std::stoull(p.take().text);
  };
  auto place = [&](auto& constraint, std::size_t pos, auto decl, const Token& at) {
    if (constraint.size() <= pos) constraint.resize(pos + 1);
    if (constraint[pos]) Parser::error_at(at.line, at.col, "position " + std::to_string(pos) + " is already constrained");
    constraint[pos] = std::move(decl);
  };

  while (!p.at(Tok::End)) {
    p.expect(Tok::LParen, "'('");
    const Token kw = p.expect(Tok::Ident, "a declaration keyword");
    envs = db.instrument();
    p.set_envs(envs);
    if (kw.text == "hintdb") {
      db.name = p.expect(Tok::Ident, "a database name").text;
    } else if (kw.text == "type") {
      const std::size_t pos = position(db.types.size());
      place(db.types, pos, type_body(p), kw);
    } else if (kw.text == "func") {
      const std::size_t pos = position(db.funcs.size());
      place(db.funcs, pos, func_body(p), kw);
    } else if (kw.text == "pred") {
      const std::size_t pos = position(db.preds.size());
      place(db.preds, pos, pred_body(p), kw);
    } else if (kw.text == "prover") {
      const Token n = p.expect(Tok::Ident, "a prover name");
      if (!make_prover(n.text)) Parser::error_at(n.line, n.col, "unknown prover '" + n.text + "'");
      db.provers.push_back(n.text);
    } else if (kw.text == "memeval") {
      const Token n = p.expect(Tok::Ident, "a memory evaluator name");
      if (!make_mem_eval(n.text))
        Parser::error_at(n.line, n.col, "unknown memory evaluator '" + n.text + "'");
      db.memevals.push_back(n.text);
    } else if (kw.text == "bounds") {
      const Token s = p.expect(Tok::String, "a quoted bounds description");
      bounds_text.emplace(s.text, s);
    } else if (kw.text == "lemma") {
      HintLemma l;
      l.name = p.expect(Tok::Ident, "a lemma name").text;
      const Token dir = p.expect(Tok::Ident, "forward or backward");
      if (dir.text == "forward")
        l.direction = Direction::Forward;
      else if (dir.text == "backward")
        l.direction = Direction::Backward;
      else
        Parser::fail_at(dir, "forward or backward");
      p.expect(Tok::LParen, "'('");
      while (p.accept(Tok::LParen)) {
        l.binder_names.push_back(p.expect(Tok::Ident, "a binder name").text);
        l.binders.push_back(p.sort());
        p.expect(Tok::RParen, "')'");
      }
      p.expect(Tok::RParen, "')'");
      Scope scope{l.binder_names, l.binders, {}, {}};
      std::vector<Binder> vars = binders_of(scope);
      if (p.at(Tok::LParen) && p.peek(1).kind == Tok::Ident && p.peek(1).text == "when") {
        p.take();
        p.take();
        do l.pures.push_back(p.expr(vars, scope, Tvar::prop()));
        while (p.accept(Tok::Comma));
        p.expect(Tok::RParen, "')'");
      }
      l.lhs = p.sexpr(vars, scope);
      p.expect(Tok::Arrow, "'===>'");
      l.rhs = p.sexpr(vars, scope);
      if (auto err = check_lemma(envs, l)) Parser::error_at(kw.line, kw.col, *err);
      db.lemmas.push_back(std::move(l));
    } else {
      Parser::fail_at(kw, "hintdb, type, func, pred, prover, memeval, bounds or lemma");
    }
    p.expect(Tok::RParen, "')'");
  }
  if (bounds_text) {
    try {
      db.bounds = parse_bounds(db.instrument(), bounds_text->first);
    } catch (const ParseError& e) {
      Parser::error_at(bounds_text->second.line, bounds_text->second.col,
                       std::string("in bounds: ") + e.what());
    }
  }
  return db;
}

std::string render_hints(const HintDatabase& db) {
  std::ostringstream out;
  const Envs envs = db.instrument();
  if (!db.name.empty()) out << "(hintdb " << db.name << ")\n";
  for (std::size_t i = 0; i < db.types.size(); ++i)
    if (db.types[i]) out << "(type " << i << " " << db.types[i]->name << " " << db.types[i]->eq_test << ")\n";
  for (std::size_t i = 0; i < db.funcs.size(); ++i)
    if (db.funcs[i]) out << render_func_decl(envs, *db.funcs[i], std::to_string(i) + " ") << "\n";
  for (std::size_t i = 0; i < db.preds.size(); ++i)
    if (db.preds[i]) out << render_pred_decl(envs, *db.preds[i], std::to_string(i) + " ") << "\n";
  for (const auto& n : db.provers) out << "(prover " << n << ")\n";
  for (const auto& n : db.memevals) out << "(memeval " << n << ")\n";
  if (db.bounds) out << "(bounds \"" << render_bounds(envs, *db.bounds) << "\")\n";
  for (const HintLemma& l : db.lemmas) {
    const std::vector<std::string> names = display_names(envs, l.binder_names);
    out << "(lemma " << l.name << (l.direction == Direction::Forward ? " forward (" : " backward (");
    for (std::size_t i = 0; i < l.binders.size(); ++i)
      out << (i ? " " : "") << "(" << names[i] << " " << type_name(envs, l.binders[i]) << ")";
    out << ")";
    if (!l.pures.empty()) {
      out << "\n  (when ";
      for (std::size_t i = 0; i < l.pures.size(); ++i)
        out << (i ? ", " : "") << render_expr(envs, l.pures[i], names);
      out << ")";
    }
    out << "\n  " << render_sexpr(envs, l.lhs, names) << "\n  ===> "
        << render_sexpr(envs, l.rhs, names) << ")\n";
  }
  return out.str();
}

ModelBounds parse_bounds(const Envs& envs, std::string_view text) {
  ModelBounds b = ModelBounds::desk();
  std::istringstream in{std::string(text)};
  std::string item;
  std::size_t col = 1;
  std::size_t offset = 0;
  while (in >> item) {
    offset = std::string(text).find(item, offset);
    col = offset + 1;
    if (item == "desk") continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ParseError(1, col, "expected key=value, found '" + item + "'");
    const std::string key = item.substr(0, eq);
    const std::string val = item.substr(eq + 1);
    // Split on commas outside brackets.
    std::vector<std::string> parts;
    int depth = 0;
    std::string cur;
    for (char c : val) {
      if (c == '[') ++depth;
      if (c == ']') --depth;
      if (c == ',' && depth == 0) {
        parts.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    parts.push_back(cur);
    auto word = [&](const std::string& s) -> std::uint32_t {
      try {
        std::size_t used = 0;
        const auto v = std::stoull(s, &used);
        if (used != s.size() || v > 0xffffffffull) throw std::out_of_range("word");
        return static_cast<std::uint32_t>(v);
      } catch (...) {
        throw ParseError(1, col, "expected a word, found '" + s + "'");
      }
    };
    if (key == "addr") {
      b.max_address = word(val);
    } else if (key == "step") {
      b.address_step = word(val);
      if (b.address_step == 0) throw ParseError(1, col, "step must be positive");
    } else if (key == "heap") {
      b.heap_values.clear();
      for (const auto& s : parts) b.heap_values.push_back(word(s));
    } else {
      Tvar t;
      if (key != "Prop") {
        auto idx = envs.find_type(key);
        if (!idx) throw ParseError(1, col, "unknown sort '" + key + "'");
        t = Tvar::type(*idx);
      }
      std::vector<Value> samples;
      for (const auto& s : parts) {
        Expr e = Expr::var(0);
        try {
          e = parse_expr(envs, s, {}, t);
        } catch (const ParseError& err) {
          throw ParseError(1, col, "bad sample '" + s + "' for " + key + ": " + err.what());
        }
        if (!e.is(Expr::Kind::Const)) throw ParseError(1, col, "sample '" + s + "' is not a literal");
        samples.push_back(e.literal());
      }
      b.value_samples[t] = std::move(samples);
    }
    offset += item.size();
  }
  return b;
}

std::string render_bounds(const Envs& envs, const ModelBounds& b) {
  std::string s = "addr=" + std::to_string(b.max_address) + " step=" +
                  std::to_string(b.address_step) + " heap=";
  for (std::size_t i = 0; i < b.heap_values.size(); ++i)
    s += (i ? "," : "") + std::to_string(b.heap_values[i]);
  for (const auto& [t, vals] : b.value_samples) {
    s += " " + type_name(envs, t) + "=";
    for (std::size_t i = 0; i < vals.size(); ++i) {
      std::string v = literal_text(vals[i]);
      v.erase(std::remove(v.begin(), v.end(), ' '), v.end());
      s += (i ? "," : "") + v;
    }
  }
  return s;
}

GoalFile residual_goal(const Envs& envs, const Residual& r,
                       const std::vector<std::string>& uvar_names) {
  GoalFile g;
  g.envs = envs;
  g.vars = r.foralls;
  g.var_names = r.forall_names;
  g.uvars = r.pre_uvars;
  g.uvar_names = uvar_names;
  g.uvar_names.resize(g.uvars.size());
  g.lhs = denormalize(r.lhs_rem);

  const std::size_t nf = r.foralls.size();
  const std::size_t pre = r.pre_uvars.size();
  auto close = [&](const Expr& e) {
    return map_uvars(e, [&](std::size_t n) {
      return n >= pre && n - pre < r.exists_left.size() ? Expr::var(nf + n - pre) : Expr::uvar(n);
    });
  };
  SHeap rhs = map_exprs(r.rhs_rem, close);
  for (const auto& [u, image] : r.uvar_equations)
    rhs.pures.push_back(Expr::equal(r.pre_uvars[u], Expr::uvar(u), close(image)));
  rhs.exists = r.exists_left;
  rhs.exists_names.assign(r.exists_left.size(), "");
  g.rhs = denormalize(rhs);
  return g;
}

}  // namespace sepref
