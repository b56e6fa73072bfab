#include "sepref/sheap.hpp"

namespace sepref {

std::size_t SHeap::atom_count() const {
  std::size_t n = 0;
  for (const auto& [p, list] : impures) n += list.size();
  return n;
}

std::vector<Atom> SHeap::atoms() const {
  std::vector<Atom> out;
  for (const auto& [p, list] : impures)
    for (const auto& args : list) out.push_back({p, args});
  return out;
}

void SHeap::add_atom(std::size_t pred, std::vector<Expr> args) {
  impures[pred].push_back(std::move(args));
}

namespace {

struct Normalizer {
  std::size_t base;
  SHeap out;

  Expr rename(const Expr& e, const std::vector<std::size_t>& ctx) const {
    return map_vars(e, [&](std::size_t n) { return Expr::var(n < ctx.size() ? ctx[n] : n); });
  }

  void go(const Sexpr& s, std::vector<std::size_t>& ctx) {
    switch (s.kind()) {
      case Sexpr::Kind::Emp: return;
      case Sexpr::Kind::Star:
        go(s.left(), ctx);
        go(s.right(), ctx);
        return;
      case Sexpr::Kind::Inj: out.pures.push_back(rename(s.expr(), ctx)); return;
      case Sexpr::Kind::Pred: {
        std::vector<Expr> args;
        for (const Expr& a : s.args()) args.push_back(rename(a, ctx));
        out.add_atom(s.index(), std::move(args));
        return;
      }
      case Sexpr::Kind::Exists:
        ctx.push_back(base + out.exists.size());
        out.exists.push_back(s.type());
        out.exists_names.push_back(s.name());
        go(s.body(), ctx);
        ctx.pop_back();
        return;
    }
  }
};

}  // namespace

SHeap normalize(const Sexpr& s, std::size_t base) {
  Normalizer n{base, {}};
  std::vector<std::size_t> ctx(base);
  for (std::size_t i = 0; i < base; ++i) ctx[i] = i;
  n.go(s, ctx);
  return std::move(n.out);
}

Sexpr denormalize(const SHeap& h) {
  std::vector<Sexpr> parts;
  for (const Expr& p : h.pures) parts.push_back(Sexpr::inj(p));
  for (const auto& [p, list] : h.impures)
    for (const auto& args : list) parts.push_back(Sexpr::pred(p, args));
  Sexpr body = Sexpr::star_all(std::move(parts));
  for (std::size_t i = h.exists.size(); i-- > 0;)
    body = Sexpr::exists(h.exists[i], body, i < h.exists_names.size() ? h.exists_names[i] : "");
  return body;
}

SHeap map_exprs(const SHeap& h, const std::function<Expr(const Expr&)>& f) {
  SHeap out;
  out.exists = h.exists;
  out.exists_names = h.exists_names;
  for (const Expr& p : h.pures) out.pures.push_back(f(p));
  for (const auto& [p, list] : h.impures)
    for (const auto& args : list) {
      std::vector<Expr> mapped;
      for (const Expr& a : args) mapped.push_back(f(a));
      out.add_atom(p, std::move(mapped));
    }
  return out;
}

std::strong_ordering atom_order(const Atom& a, const Atom& b) {
  if (auto c = a.pred <=> b.pred; c != 0) return c;
  return args_compare(a.args, b.args);
}

}  // namespace sepref
