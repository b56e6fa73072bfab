#include "sepref/model.hpp"

#include <algorithm>
#include <sstream>

namespace sepref {

namespace {

std::optional<std::uint64_t> as_number(const Value& v) {
  if (auto w = std::get_if<Word>(&v)) return w->v;
  if (auto n = std::get_if<Nat>(&v)) return n->v;
  return std::nullopt;
}

// Arithmetic on two words or two nats; words wrap at 2^32.
template <class Op>
FuncImpl arith(Op op) {
  return {2, [op](std::span<const Value> a) -> std::optional<Value> {
            if (auto x = std::get_if<Word>(&a[0]))
              if (auto y = std::get_if<Word>(&a[1]))
                return Word{static_cast<std::uint32_t>(op(std::uint64_t{x->v}, std::uint64_t{y->v}))};
            if (auto x = std::get_if<Nat>(&a[0]))
              if (auto y = std::get_if<Nat>(&a[1])) return Nat{op(x->v, y->v)};
            return std::nullopt;
          }};
}

template <class Cmp, class Wrap>
FuncImpl compare(Cmp cmp, Wrap wrap) {
  return {2, [cmp, wrap](std::span<const Value> a) -> std::optional<Value> {
            auto x = as_number(a[0]);
            auto y = as_number(a[1]);
            if (!x || !y || a[0].index() != a[1].index()) return std::nullopt;
            return wrap(cmp(*x, *y));
          }};
}

const WordSeq* seq_arg(std::span<const Value> a, std::size_t i) {
  return std::get_if<WordSeq>(&a[i]);
}
const Word* word_arg(std::span<const Value> a, std::size_t i) { return std::get_if<Word>(&a[i]); }

Heap without(const Heap& h, std::initializer_list<std::uint32_t> addrs) {
  Heap out = h;
  for (auto a : addrs) out.erase(a);
  return out;
}

bool sll_holds(std::span<const std::uint32_t> ws, std::uint32_t p, const Heap& h) {
  if (ws.empty()) return p == 0 && h.empty();
  if (p == 0) return false;
  const std::uint32_t next_addr = p + 4;
  auto cell = h.find(p);
  auto link = h.find(next_addr);
  if (cell == h.end() || link == h.end() || cell->second != ws[0]) return false;
  return sll_holds(ws.subspan(1), link->second, without(h, {p, next_addr}));
}

bool array_holds(const std::vector<std::uint32_t>& ws, std::uint32_t base, const Heap& h) {
  if (h.size() != ws.size()) return false;
  for (std::size_t i = 0; i < ws.size(); ++i) {
    auto it = h.find(base + static_cast<std::uint32_t>(4 * i));
    if (it == h.end() || it->second != ws[i]) return false;
  }
  return true;
}

bool strictly_sorted(const std::vector<std::uint32_t>& s) {
  return std::adjacent_find(s.begin(), s.end(), std::greater_equal<>()) == s.end();
}

bool bst_holds(const std::vector<std::uint32_t>& s, std::uint32_t p, const Heap& h);

// Is there a split of `h` into a tree for `sl` at `l` and one for `sr` at `r`?
bool bst_pair(const std::vector<std::uint32_t>& sl, std::uint32_t l,
              const std::vector<std::uint32_t>& sr, std::uint32_t r, const Heap& h) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> cells(h.begin(), h.end());
  const std::size_t n = cells.size();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    Heap a, b;
    for (std::size_t i = 0; i < n; ++i) ((mask >> i) & 1 ? a : b).insert(cells[i]);
    if (bst_holds(sl, l, a) && bst_holds(sr, r, b)) return true;
  }
  return false;
}

bool bst_holds(const std::vector<std::uint32_t>& s, std::uint32_t p, const Heap& h) {
  if (!strictly_sorted(s)) return false;
  if (p == 0) return s.empty() && h.empty();
  auto left = h.find(p);
  auto key = h.find(p + 4);
  auto right = h.find(p + 8);
  if (left == h.end() || key == h.end() || right == h.end()) return false;
  const std::uint32_t k = key->second;
  if (!std::binary_search(s.begin(), s.end(), k)) return false;
  std::vector<std::uint32_t> sl, sr;
  for (auto x : s) (x < k ? sl : sr).push_back(x);
  sr.erase(sr.begin());  // drop k itself
  return bst_pair(sl, left->second, sr, right->second, without(h, {p, p + 4, p + 8}));
}

}  // namespace

Interp Interp::builtin() {
  Interp in;
  auto& f = in.funcs;
  f["plus"] = arith([](std::uint64_t a, std::uint64_t b) { return a + b; });
  f["minus"] = arith([](std::uint64_t a, std::uint64_t b) { return a - b; });
  f["mult"] = arith([](std::uint64_t a, std::uint64_t b) { return a * b; });
  auto prop = [](bool b) -> Value { return PropV{b}; };
  auto boolean = [](bool b) -> Value { return Bool{b}; };
  f["lt"] = compare(std::less<>(), prop);
  f["le"] = compare(std::less_equal<>(), prop);
  f["ltb"] = compare(std::less<>(), boolean);
  f["ne"] = {2, [](std::span<const Value> a) -> std::optional<Value> {
               if (a[0].index() != a[1].index()) return std::nullopt;
               return PropV{a[0] != a[1]};
             }};
  f["not"] = {1, [](std::span<const Value> a) -> std::optional<Value> {
                if (auto p = std::get_if<PropV>(&a[0])) return PropV{!p->v};
                return std::nullopt;
              }};
  f["and"] = {2, [](std::span<const Value> a) -> std::optional<Value> {
                auto p = std::get_if<PropV>(&a[0]);
                auto q = std::get_if<PropV>(&a[1]);
                if (!p || !q) return std::nullopt;
                return PropV{p->v && q->v};
              }};
  f["true"] = {0, [](std::span<const Value>) -> std::optional<Value> { return PropV{true}; }};
  f["nil"] = {0, [](std::span<const Value>) -> std::optional<Value> { return WordSeq{}; }};
  f["cons"] = {2, [](std::span<const Value> a) -> std::optional<Value> {
                 auto x = word_arg(a, 0);
                 auto s = seq_arg(a, 1);
                 if (!x || !s) return std::nullopt;
                 WordSeq out{{x->v}};
                 out.ws.insert(out.ws.end(), s->ws.begin(), s->ws.end());
                 return out;
               }};
  f["app"] = {2, [](std::span<const Value> a) -> std::optional<Value> {
                auto s = seq_arg(a, 0);
                auto t = seq_arg(a, 1);
                if (!s || !t) return std::nullopt;
                WordSeq out = *s;
                out.ws.insert(out.ws.end(), t->ws.begin(), t->ws.end());
                return out;
              }};
  f["len"] = {1, [](std::span<const Value> a) -> std::optional<Value> {
                auto s = seq_arg(a, 0);
                if (!s) return std::nullopt;
                return Word{static_cast<std::uint32_t>(s->ws.size())};
              }};
  f["sel"] = {2, [](std::span<const Value> a) -> std::optional<Value> {
                auto s = seq_arg(a, 0);
                auto i = word_arg(a, 1);
                if (!s || !i) return std::nullopt;
                return Word{i->v < s->ws.size() ? s->ws[i->v] : 0u};
              }};
  f["upd"] = {3, [](std::span<const Value> a) -> std::optional<Value> {
                auto s = seq_arg(a, 0);
                auto i = word_arg(a, 1);
                auto v = word_arg(a, 2);
                if (!s || !i || !v) return std::nullopt;
                WordSeq out = *s;
                if (i->v < out.ws.size()) out.ws[i->v] = v->v;
                return out;
              }};
  f["join"] = {3, [](std::span<const Value> a) -> std::optional<Value> {
                 auto l = seq_arg(a, 0);
                 auto k = word_arg(a, 1);
                 auto r = seq_arg(a, 2);
                 if (!l || !k || !r) return std::nullopt;
                 WordSeq out = *l;
                 out.ws.push_back(k->v);
                 out.ws.insert(out.ws.end(), r->ws.begin(), r->ws.end());
                 return out;
               }};
  f["all_lt"] = {2, [](std::span<const Value> a) -> std::optional<Value> {
                   auto s = seq_arg(a, 0);
                   auto k = word_arg(a, 1);
                   if (!s || !k) return std::nullopt;
                   return PropV{std::all_of(s->ws.begin(), s->ws.end(),
                                            [&](std::uint32_t x) { return x < k->v; })};
                 }};
  f["all_gt"] = {2, [](std::span<const Value> a) -> std::optional<Value> {
                   auto s = seq_arg(a, 0);
                   auto k = word_arg(a, 1);
                   if (!s || !k) return std::nullopt;
                   return PropV{std::all_of(s->ws.begin(), s->ws.end(),
                                            [&](std::uint32_t x) { return x > k->v; })};
                 }};

  auto& p = in.preds;
  p["emp"] = {0, [](std::span<const Value>, const Heap& h) { return h.empty(); }};
  p["ptsto"] = {2, [](std::span<const Value> a, const Heap& h) {
                  auto addr = word_arg(a, 0);
                  auto val = word_arg(a, 1);
                  if (!addr || !val || h.size() != 1) return false;
                  return h.begin()->first == addr->v && h.begin()->second == val->v;
                }};
  p["sll"] = {2, [](std::span<const Value> a, const Heap& h) {
                auto s = seq_arg(a, 0);
                auto ptr = word_arg(a, 1);
                return s && ptr && sll_holds(s->ws, ptr->v, h);
              }};
  p["array"] = {2, [](std::span<const Value> a, const Heap& h) {
                  auto s = seq_arg(a, 0);
                  auto base = word_arg(a, 1);
                  return s && base && array_holds(s->ws, base->v, h);
                }};
  p["bst"] = {2, [](std::span<const Value> a, const Heap& h) {
                auto s = seq_arg(a, 0);
                auto ptr = word_arg(a, 1);
                return s && ptr && bst_holds(s->ws, ptr->v, h);
              }};
  return in;
}

std::optional<std::string> check_envs(const Envs& envs, const Interp& interp) {
  for (const auto& t : envs.types)
    if (!find_eq_test(t.eq_test))
      return "type '" + t.name + "' names unknown equality tester '" + t.eq_test + "'";
  auto sort_ok = [&](const Tvar& t) { return t.is_prop() || t.index() < envs.types.size(); };
  for (const auto& f : envs.funcs) {
    if (!std::all_of(f.domain.begin(), f.domain.end(), sort_ok) || !sort_ok(f.range))
      return "function '" + f.name + "' mentions an undeclared type";
    if (f.interp == kFreeInterp) {
      if (!f.domain.empty()) return "free function '" + f.name + "' must be nullary";
      continue;
    }
    auto it = interp.funcs.find(f.interp);
    if (it == interp.funcs.end())
      return "function '" + f.name + "' names unknown interpretation '" + f.interp + "'";
    if (it->second.arity != f.domain.size())
      return "function '" + f.name + "' has arity " + std::to_string(f.domain.size()) +
             " but interpretation '" + f.interp + "' takes " + std::to_string(it->second.arity);
  }
  for (const auto& p : envs.preds) {
    if (!std::all_of(p.domain.begin(), p.domain.end(), sort_ok))
      return "predicate '" + p.name + "' mentions an undeclared type";
    auto it = interp.preds.find(p.interp);
    if (it == interp.preds.end())
      return "predicate '" + p.name + "' names unknown interpretation '" + p.interp + "'";
    if (it->second.arity != p.domain.size())
      return "predicate '" + p.name + "' has arity " + std::to_string(p.domain.size()) +
             " but interpretation '" + p.interp + "' takes " + std::to_string(it->second.arity);
  }
  return std::nullopt;
}

std::vector<std::size_t> free_globals(const Envs& envs) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < envs.funcs.size(); ++i)
    if (envs.funcs[i].interp == kFreeInterp && envs.funcs[i].domain.empty()) out.push_back(i);
  return out;
}

// ---------------------------------------------------------------------------
// Bounds

ModelBounds ModelBounds::desk() {
  ModelBounds b;
  b.carrier_samples[Carrier::Word] = {Word{0}, Word{1}, Word{2}, Word{3}};
  b.carrier_samples[Carrier::Nat] = {Nat{0}, Nat{1}, Nat{2}, Nat{3}};
  b.carrier_samples[Carrier::Bool] = {Bool{false}, Bool{true}};
  b.carrier_samples[Carrier::Prop] = {PropV{false}, PropV{true}};
  b.carrier_samples[Carrier::WordSeq] = {WordSeq{}, WordSeq{{0}}, WordSeq{{1}}, WordSeq{{0, 1}},
                                         WordSeq{{1, 0}}};
  return b;
}

std::vector<std::uint32_t> ModelBounds::addresses() const {
  std::vector<std::uint32_t> out;
  const std::uint32_t step = std::max<std::uint32_t>(address_step, 1);
  for (std::uint64_t a = step; a <= max_address; a += step) out.push_back(static_cast<std::uint32_t>(a));
  return out;
}

std::vector<Value> ModelBounds::samples(const Envs& envs, const Tvar& t) const {
  if (auto it = value_samples.find(t); it != value_samples.end()) return it->second;
  if (auto c = envs.carrier(t)) {
    if (auto it = carrier_samples.find(*c); it != carrier_samples.end()) return it->second;
  }
  return {};
}

// ---------------------------------------------------------------------------
// Denotation

std::optional<Value> denote_expr(const Envs& envs, const Interp& interp,
                                 std::span<const Binding> uvar_values,
                                 std::span<const Binding> var_values, const Expr& e,
                                 const Tvar& t) {
  auto in_carrier = [&](const Value& v) {
    auto c = envs.carrier(t);
    return c && *c == carrier_of(v);
  };
  switch (e.kind()) {
    case Expr::Kind::Const:
      if (e.type() != t || !in_carrier(e.literal())) return std::nullopt;
      return e.literal();
    case Expr::Kind::Var:
    case Expr::Kind::UVar: {
      auto ctx = e.is(Expr::Kind::Var) ? var_values : uvar_values;
      if (e.index() >= ctx.size() || ctx[e.index()].first != t) return std::nullopt;
      return ctx[e.index()].second;
    }
    case Expr::Kind::Func: {
      if (e.index() >= envs.funcs.size()) return std::nullopt;
      const FuncSig& sig = envs.funcs[e.index()];
      if (sig.range != t || sig.domain.size() != e.args().size()) return std::nullopt;
      if (sig.interp == kFreeInterp) {
        if (!sig.domain.empty()) return std::nullopt;
        auto it = interp.free_values.find(sig.name);
        if (it == interp.free_values.end() || !in_carrier(it->second)) return std::nullopt;
        return it->second;
      }
      auto impl = interp.funcs.find(sig.interp);
      if (impl == interp.funcs.end() || impl->second.arity != sig.domain.size())
        return std::nullopt;
      std::vector<Value> args;
      args.reserve(sig.domain.size());
      for (std::size_t i = 0; i < sig.domain.size(); ++i) {
        auto v = denote_expr(envs, interp, uvar_values, var_values, e.args()[i], sig.domain[i]);
        if (!v) return std::nullopt;
        args.push_back(std::move(*v));
      }
      auto out = impl->second.fn(args);
      if (!out || !in_carrier(*out)) return std::nullopt;
      return out;
    }
    case Expr::Kind::Equal: {
      if (!t.is_prop()) return std::nullopt;
      auto l = denote_expr(envs, interp, uvar_values, var_values, e.lhs(), e.type());
      auto r = denote_expr(envs, interp, uvar_values, var_values, e.rhs(), e.type());
      if (!l || !r) return std::nullopt;
      if (e.type().is_prop()) return PropV{*l == *r};
      const EqTester* tester = find_eq_test(envs.types[e.type().index()].eq_test);
      if (!tester) return std::nullopt;
      return PropV{tester->test(*l, *r)};
    }
  }
  return std::nullopt;
}

namespace {

struct SexprEval {
  const Envs& envs;
  const Interp& interp;
  std::span<const Binding> uvars;
  const ModelBounds& bounds;

  bool eval(const Sexpr& s, Assignment& vars, const Heap& h) const {
    switch (s.kind()) {
      case Sexpr::Kind::Emp: return h.empty();
      case Sexpr::Kind::Inj: {
        if (!h.empty()) return false;
        auto v = denote_expr(envs, interp, uvars, vars, s.expr(), Tvar::prop());
        return v && std::get<PropV>(*v).v;
      }
      case Sexpr::Kind::Pred: {
        if (s.index() >= envs.preds.size()) return false;
        const PredSig& sig = envs.preds[s.index()];
        if (sig.domain.size() != s.args().size()) return false;
        auto impl = interp.preds.find(sig.interp);
        if (impl == interp.preds.end()) return false;
        std::vector<Value> args;
        for (std::size_t i = 0; i < sig.domain.size(); ++i) {
          auto v = denote_expr(envs, interp, uvars, vars, s.args()[i], sig.domain[i]);
          if (!v) return false;
          args.push_back(std::move(*v));
        }
        return impl->second.fn(args, h);
      }
      case Sexpr::Kind::Star: return star(s.left(), s.right(), vars, h);
      case Sexpr::Kind::Exists: {
        for (const Value& v : witnesses(s.type(), h)) {
          vars.emplace_back(s.type(), v);
          const bool ok = eval(s.body(), vars, h);
          vars.pop_back();
          if (ok) return true;
        }
        return false;
      }
    }
    return false;
  }

  // The sort's samples; word sorts also try every address and content of
  // the heap, which is where pointer-valued binders find their witnesses.
  std::vector<Value> witnesses(const Tvar& t, const Heap& h) const {
    std::vector<Value> out = bounds.samples(envs, t);
    auto c = envs.carrier(t);
    if (!c || *c != Carrier::Word) return out;
    auto add = [&](std::uint32_t w) {
      const Value v = Word{w};
      if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    };
    for (const auto& [a, x] : h) {
      add(a);
      add(x);
    }
    return out;
  }

  static bool pure_only(const Sexpr& s) {
    switch (s.kind()) {
      case Sexpr::Kind::Emp:
      case Sexpr::Kind::Inj: return true;
      case Sexpr::Kind::Star: return pure_only(s.left()) && pure_only(s.right());
      case Sexpr::Kind::Exists: return pure_only(s.body());
      case Sexpr::Kind::Pred: return false;
    }
    return false;
  }

  bool star(const Sexpr& l, const Sexpr& r, Assignment& vars, const Heap& h) const {
    // A side made only of pure facts can only own the empty heap.
    if (pure_only(l)) return eval(l, vars, Heap{}) && eval(r, vars, h);
    if (pure_only(r)) return eval(r, vars, Heap{}) && eval(l, vars, h);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> cells(h.begin(), h.end());
    const std::size_t n = cells.size();
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
      Heap a, b;
      for (std::size_t i = 0; i < n; ++i) ((mask >> i) & 1 ? a : b).insert(cells[i]);
      if (eval(l, vars, a) && eval(r, vars, b)) return true;
    }
    return false;
  }
};

// Odometer over the cartesian product of per-position choices.
bool advance(std::vector<std::size_t>& digits, const std::vector<std::size_t>& radix) {
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (++digits[i] < radix[i]) return true;
    digits[i] = 0;
  }
  return false;
}

}  // namespace

bool denote_sexpr(const Envs& envs, const Interp& interp, std::span<const Binding> uvar_values,
                  std::span<const Binding> var_values, const Sexpr& s, const Heap& h,
                  const ModelBounds& bounds) {
  Assignment vars(var_values.begin(), var_values.end());
  return SexprEval{envs, interp, uvar_values, bounds}.eval(s, vars, h);
}

std::optional<Counterexample> oracle_counterexample(const Envs& envs, const Interp& base_interp,
                                                    const OracleQuery& q,
                                                    const ModelBounds& bounds) {
  // Quantified slots: free globals, regular variables, non-derived uvars.
  struct Slot {
    enum class Kind { Global, Var, UVar } kind;
    std::size_t index;
    std::vector<Value> choices;
  };
  std::vector<Slot> slots;
  for (std::size_t f : free_globals(envs))
    slots.push_back({Slot::Kind::Global, f, bounds.samples(envs, envs.funcs[f].range)});
  for (std::size_t i = 0; i < q.var_types.size(); ++i)
    slots.push_back({Slot::Kind::Var, i, bounds.samples(envs, q.var_types[i])});
  for (std::size_t i = 0; i < q.uvar_types.size(); ++i)
    if (!q.derived_uvars.contains(i))
      slots.push_back({Slot::Kind::UVar, i, bounds.samples(envs, q.uvar_types[i])});
  for (const Slot& s : slots)
    if (s.choices.empty()) return std::nullopt;  // nothing to quantify over

  const auto addrs = bounds.addresses();
  std::vector<std::size_t> heap_radix(addrs.size(), bounds.heap_values.size() + 1);
  std::vector<std::size_t> slot_radix;
  for (const Slot& s : slots) slot_radix.push_back(s.choices.size());

  Interp interp = base_interp;
  std::vector<std::size_t> pick(slots.size(), 0);
  do {
    Assignment vars, uvars;
    for (const Tvar& t : q.var_types) vars.emplace_back(t, Value{});
    for (const Tvar& t : q.uvar_types) uvars.emplace_back(t, Value{});
    for (std::size_t i = 0; i < slots.size(); ++i) {
      const Value& v = slots[i].choices[pick[i]];
      switch (slots[i].kind) {
        case Slot::Kind::Global: interp.free_values[envs.funcs[slots[i].index].name] = v; break;
        case Slot::Kind::Var: vars[slots[i].index].second = v; break;
        case Slot::Kind::UVar: uvars[slots[i].index].second = v; break;
      }
    }
    bool admissible = true;
    for (const auto& [u, image] : q.derived_uvars) {
      auto v = denote_expr(envs, interp, uvars, vars, image, q.uvar_types[u]);
      if (!v) {
        admissible = false;
        break;
      }
      uvars[u].second = *v;
    }
    for (std::size_t i = 0; admissible && i < q.premises.size(); ++i) {
      auto v = denote_expr(envs, interp, uvars, vars, q.premises[i], Tvar::prop());
      admissible = v && std::get<PropV>(*v).v;
    }
    if (!admissible) continue;

    SexprEval ev{envs, interp, uvars, bounds};
    std::vector<std::size_t> cell(addrs.size(), 0);
    do {
      Heap h;
      for (std::size_t i = 0; i < addrs.size(); ++i)
        if (cell[i] > 0) h[addrs[i]] = bounds.heap_values[cell[i] - 1];
      Assignment scratch = vars;
      if (!ev.eval(q.lhs, scratch, h)) continue;
      if (ev.eval(q.rhs, scratch, h)) continue;
      Counterexample cex{h, {}, vars, uvars};
      for (std::size_t f : free_globals(envs))
        cex.globals[envs.funcs[f].name] = interp.free_values[envs.funcs[f].name];
      return cex;
    } while (advance(cell, heap_radix));
  } while (advance(pick, slot_radix));
  return std::nullopt;
}

bool entails_oracle(const Envs& envs, const Interp& interp, std::span<const Tvar> uvars,
                    const Sexpr& lhs, const Sexpr& rhs, const ModelBounds& bounds) {
  OracleQuery q;
  q.lhs = lhs;
  q.rhs = rhs;
  q.uvar_types.assign(uvars.begin(), uvars.end());
  return !oracle_counterexample(envs, interp, q, bounds);
}

std::string to_string(const Heap& h) {
  std::ostringstream out;
  out << '{';
  bool first = true;
  for (const auto& [a, v] : h) {
    out << (first ? "" : ", ") << a << " -> " << v;
    first = false;
  }
  out << '}';
  return out.str();
}

}  // namespace sepref
