#include "sepref/provers.hpp"

#include <map>
#include <sstream>

namespace sepref {

Facts Prover::summarize(const Envs& envs, std::span<const Expr> pures) const {
  Facts f;
  f.envs = std::make_shared<const Envs>(envs);
  f.pures.assign(pures.begin(), pures.end());
  f.digest = impl_->summarize(envs, pures);
  return f;
}

bool Prover::prove(const Facts& facts, const Expr& goal) const {
  return impl_->prove(*facts.envs, facts.digest, goal);
}

namespace {

bool is_func(const Envs& envs, const Expr& e, std::string_view interp, std::size_t arity) {
  return e.is(Expr::Kind::Func) && e.index() < envs.funcs.size() &&
         envs.funcs[e.index()].interp == interp && e.args().size() == arity;
}

bool word_sort(const Envs& envs, const Tvar& t) {
  auto c = envs.carrier(t);
  return c && *c == Carrier::Word;
}

class ReflexivityImpl final : public Prover::Impl {
 public:
  std::any summarize(const Envs&, std::span<const Expr>) const override { return {}; }
  bool prove(const Envs& envs, const std::any&, const Expr& goal) const override {
    return goal.is(Expr::Kind::Equal) && expr_syntactic_eq(envs, goal.lhs(), goal.rhs());
  }
};

class AssumptionImpl final : public Prover::Impl {
 public:
  std::any summarize(const Envs&, std::span<const Expr> pures) const override {
    return std::vector<Expr>(pures.begin(), pures.end());
  }
  bool prove(const Envs& envs, const std::any& digest, const Expr& goal) const override {
    for (const Expr& f : std::any_cast<const std::vector<Expr>&>(digest))
      if (expr_syntactic_eq(envs, f, goal)) return true;
    return false;
  }
};

// --- words -----------------------------------------------------------------

// e denotes val(root) + offset; an absent root is the constant 0.
struct Linear {
  std::optional<Expr> root;
  std::uint32_t offset = 0;
};

Linear linearize(const Envs& envs, const Expr& e) {
  if (e.is(Expr::Kind::Const))
    if (auto w = std::get_if<Word>(&e.literal())) return {std::nullopt, w->v};
  const bool plus = is_func(envs, e, "plus", 2);
  const bool minus = is_func(envs, e, "minus", 2);
  if ((plus || minus) && word_sort(envs, envs.funcs[e.index()].range)) {
    auto constant = [](const Expr& x) -> std::optional<std::uint32_t> {
      if (x.is(Expr::Kind::Const))
        if (auto w = std::get_if<Word>(&x.literal())) return w->v;
      return std::nullopt;
    };
    if (auto k = constant(e.args()[1])) {
      Linear l = linearize(envs, e.args()[0]);
      l.offset += plus ? *k : static_cast<std::uint32_t>(0u - *k);
      return l;
    }
    if (auto k = constant(e.args()[0]); k && plus) {
      Linear l = linearize(envs, e.args()[1]);
      l.offset += *k;
      return l;
    }
  }
  return {e, 0};
}

// Union-find with offsets: val(node) = val(parent) + offset.
class OffsetUnionFind {
 public:
  static constexpr std::size_t kZero = 0;

  OffsetUnionFind() : parent_{kZero}, offset_{0} {}

  std::optional<std::size_t> id_of(const std::optional<Expr>& root) const {
    if (!root) return kZero;
    auto it = ids_.find(*root);
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t intern(const std::optional<Expr>& root) {
    if (auto id = id_of(root)) return *id;
    const std::size_t id = parent_.size();
    parent_.push_back(id);
    offset_.push_back(0);
    ids_.emplace(*root, id);
    return id;
  }

  // (representative, val(n) - val(representative))
  std::pair<std::size_t, std::uint32_t> find(std::size_t n) const {
    std::uint32_t acc = 0;
    while (parent_[n] != n) {
      acc += offset_[n];
      n = parent_[n];
    }
    return {n, acc};
  }

  // Record val(a) - val(b) = d.
  void relate(std::size_t a, std::size_t b, std::uint32_t d) {
    auto [ra, oa] = find(a);
    auto [rb, ob] = find(b);
    if (ra == rb) {
      if (oa - ob != d) inconsistent_ = true;
      return;
    }
    parent_[ra] = rb;
    offset_[ra] = d - oa + ob;
  }

  bool inconsistent() const { return inconsistent_; }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::uint32_t> offset_;
  std::map<Expr, std::size_t, ExprLess> ids_;
  bool inconsistent_ = false;
};

struct WordDigest {
  OffsetUnionFind uf;
  // Known disequalities val(node1) + k1 != val(node2) + k2.
  struct Diseq {
    std::size_t a;
    std::uint32_t ka;
    std::size_t b;
    std::uint32_t kb;
  };
  std::vector<Diseq> diseqs;
};

// Returns the two sides of a word equality or disequality goal/fact.
std::optional<std::pair<Expr, Expr>> word_sides(const Envs& envs, const Expr& e, bool& equal) {
  if (e.is(Expr::Kind::Equal) && word_sort(envs, e.type())) {
    equal = true;
    return std::pair{e.lhs(), e.rhs()};
  }
  if (is_func(envs, e, "ne", 2) && word_sort(envs, envs.funcs[e.index()].domain[0])) {
    equal = false;
    return std::pair{e.args()[0], e.args()[1]};
  }
  return std::nullopt;
}

class WordImpl final : public Prover::Impl {
 public:
  std::any summarize(const Envs& envs, std::span<const Expr> pures) const override {
    WordDigest d;
    for (const Expr& f : pures) {
      bool equal = true;
      auto sides = word_sides(envs, f, equal);
      if (!sides) continue;
      Linear l = linearize(envs, sides->first);
      Linear r = linearize(envs, sides->second);
      const std::size_t il = d.uf.intern(l.root), ir = d.uf.intern(r.root);
      if (equal)
        d.uf.relate(il, ir, r.offset - l.offset);
      else
        d.diseqs.push_back({il, l.offset, ir, r.offset});
    }
    return d;
  }

  bool prove(const Envs& envs, const std::any& digest, const Expr& goal) const override {
    const auto& d = std::any_cast<const WordDigest&>(digest);
    const auto& uf = d.uf;
    bool want_equal = true;
    auto sides = word_sides(envs, goal, want_equal);
    if (!sides) return false;
    if (uf.inconsistent()) return true;
    Linear l = linearize(envs, sides->first);
    Linear r = linearize(envs, sides->second);
    // val(a) - val(b) = val(ra) + ka - val(rb) - kb
    std::optional<std::uint32_t> diff;
    if (l.root && r.root && *l.root == *r.root) {
      diff = l.offset - r.offset;
    } else {
      auto ia = uf.id_of(l.root);
      auto ib = uf.id_of(r.root);
      if (ia && ib) {
        auto [ra, oa] = uf.find(*ia);
        auto [rb, ob] = uf.find(*ib);
        if (ra == rb) diff = (oa + l.offset) - (ob + r.offset);
      }
    }
    if (diff) return want_equal ? *diff == 0 : *diff != 0;
    if (want_equal) return false;

    // a + s != b + s follows from a known a != b.
    auto ia = uf.id_of(l.root);
    auto ib = uf.id_of(r.root);
    if (!ia || !ib) return false;
    auto [ra, oa] = uf.find(*ia);
    auto [rb, ob] = uf.find(*ib);
    const std::uint32_t ga = oa + l.offset, gb = ob + r.offset;
    for (const auto& q : d.diseqs) {
      auto [qa, pa] = uf.find(q.a);
      auto [qb, pb] = uf.find(q.b);
      const std::uint32_t fa = pa + q.ka, fb = pb + q.kb;
      if (qa == ra && qb == rb && ga - fa == gb - fb) return true;
      if (qa == rb && qb == ra && gb - fa == ga - fb) return true;
    }
    return false;
  }
};

// --- array bounds ------------------------------------------------------------

class BoundsImpl final : public Prover::Impl {
 public:
  struct Digest {
    // Array roots related by equal length, keyed by their canonical root.
    std::map<Expr, Expr, ExprLess> parent;
    std::vector<std::pair<Expr, Expr>> bounds;  // (index, array root)

    Expr find(const Expr& e) const {
      Expr cur = e;
      for (auto it = parent.find(cur); it != parent.end(); it = parent.find(cur)) cur = it->second;
      return cur;
    }
    void join(const Expr& a, const Expr& b) {
      Expr ra = find(a), rb = find(b);
      if (!(ra == rb)) parent.insert_or_assign(ra, rb);
    }
  };

  static Expr strip_updates(const Envs& envs, Expr e) {
    while (is_func(envs, e, "upd", 3)) {
      Expr inner = e.args()[0];
      e = inner;
    }
    return e;
  }

  // Matches lt(i, len(arr)), returning (i, arr).
  static std::optional<std::pair<Expr, Expr>> bound_shape(const Envs& envs, const Expr& e) {
    if (!is_func(envs, e, "lt", 2)) return std::nullopt;
    const Expr& len = e.args()[1];
    if (!is_func(envs, len, "len", 1)) return std::nullopt;
    return std::pair{e.args()[0], len.args()[0]};
  }

  std::any summarize(const Envs& envs, std::span<const Expr> pures) const override {
    Digest d;
    for (const Expr& f : pures) {
      if (auto b = bound_shape(envs, f)) {
        d.bounds.emplace_back(b->first, strip_updates(envs, b->second));
      } else if (f.is(Expr::Kind::Equal)) {
        const Expr& l = f.lhs();
        const Expr& r = f.rhs();
        if (is_func(envs, l, "len", 1) && is_func(envs, r, "len", 1))
          d.join(strip_updates(envs, l.args()[0]), strip_updates(envs, r.args()[0]));
        else if (auto c = envs.carrier(f.type()); c && *c == Carrier::WordSeq)
          d.join(strip_updates(envs, l), strip_updates(envs, r));
      }
    }
    return d;
  }

  bool prove(const Envs& envs, const std::any& digest, const Expr& goal) const override {
    const auto& d = std::any_cast<const Digest&>(digest);
    auto shape = bound_shape(envs, goal);
    if (!shape) return false;
    const Expr root = d.find(strip_updates(envs, shape->second));
    for (const auto& [j, arr] : d.bounds) {
      if (!(d.find(arr) == root)) continue;
      if (expr_syntactic_eq(envs, shape->first, j)) return true;
      const Expr& i = shape->first;
      if (i.is(Expr::Kind::Const) && j.is(Expr::Kind::Const)) {
        auto wi = std::get_if<Word>(&i.literal());
        auto wj = std::get_if<Word>(&j.literal());
        if (wi && wj && wi->v <= wj->v) return true;
      }
    }
    return false;
  }
};

// --- sequence bounds -----------------------------------------------------------

// all_lt(s, k) / all_gt(s, k): the empty sequence is below and above every
// key; a join is when both halves and its own key are, each shown
// recursively or found among the facts.
class OrderImpl final : public Prover::Impl {
 public:
  std::any summarize(const Envs&, std::span<const Expr> pures) const override {
    return std::vector<Expr>(pures.begin(), pures.end());
  }

  bool prove(const Envs& envs, const std::any& digest, const Expr& goal) const override {
    return holds(envs, std::any_cast<const std::vector<Expr>&>(digest), goal);
  }

 private:
  static bool holds(const Envs& envs, const std::vector<Expr>& facts, const Expr& goal) {
    for (const Expr& f : facts)
      if (expr_syntactic_eq(envs, f, goal)) return true;
    for (std::string_view rel : {"all_lt", "all_gt"}) {
      if (!is_func(envs, goal, rel, 2)) continue;
      const Expr& s = goal.args()[0];
      const Expr& k = goal.args()[1];
      if (is_func(envs, s, "nil", 0)) return true;
      if (!is_func(envs, s, "join", 3)) return false;
      const auto key = envs.func_by_interp("lt");
      if (!key) return false;
      const Expr key_ok = rel == "all_lt" ? Expr::func(*key, {s.args()[1], k})
                                          : Expr::func(*key, {k, s.args()[1]});
      return holds(envs, facts, Expr::func(goal.index(), {s.args()[0], k})) &&
             holds(envs, facts, key_ok) &&
             holds(envs, facts, Expr::func(goal.index(), {s.args()[2], k}));
    }
    return false;
  }
};

class DisjunctionImpl final : public Prover::Impl {
 public:
  DisjunctionImpl(Prover a, Prover b) : a_(std::move(a)), b_(std::move(b)) {}

  std::any summarize(const Envs& envs, std::span<const Expr> pures) const override {
    return std::pair{a_.summarize(envs, pures), b_.summarize(envs, pures)};
  }
  bool prove(const Envs&, const std::any& digest, const Expr& goal) const override {
    const auto& [fa, fb] = std::any_cast<const std::pair<Facts, Facts>&>(digest);
    return a_.prove(fa, goal) || b_.prove(fb, goal);
  }

 private:
  Prover a_, b_;
};

}  // namespace

Prover reflexivity_prover() {
  return {"reflexivity", std::make_shared<const ReflexivityImpl>()};
}
Prover assumption_prover() { return {"assumption", std::make_shared<const AssumptionImpl>()}; }
Prover word_prover() { return {"word", std::make_shared<const WordImpl>()}; }
Prover bounds_prover() { return {"bounds", std::make_shared<const BoundsImpl>()}; }
Prover order_prover() { return {"order", std::make_shared<const OrderImpl>()}; }

Prover compose_provers(const Prover& p1, const Prover& p2) {
  return {p1.name() + "+" + p2.name(), std::make_shared<const DisjunctionImpl>(p1, p2)};
}

std::optional<Prover> make_prover(std::string_view spec) {
  std::optional<Prover> acc;
  std::size_t start = 0;
  while (start <= spec.size()) {
    std::size_t end = spec.find('+', start);
    if (end == std::string_view::npos) end = spec.size();
    std::string_view name = spec.substr(start, end - start);
    std::optional<Prover> p;
    if (name == "reflexivity") p = reflexivity_prover();
    else if (name == "assumption") p = assumption_prover();
    else if (name == "word") p = word_prover();
    else if (name == "bounds") p = bounds_prover();
    else if (name == "order") p = order_prover();
    else if (name == "default")
      p = compose_provers(compose_provers(reflexivity_prover(), assumption_prover()),
                          compose_provers(word_prover(), compose_provers(bounds_prover(), order_prover())));
    if (!p) return std::nullopt;
    acc = acc ? compose_provers(*acc, *p) : *p;
    start = end + 1;
  }
  return acc;
}

namespace {

void split_into(const Envs& envs, const Expr& a, const Expr& b, const Tvar& t,
                std::vector<Obligation>& out) {
  if (expr_syntactic_eq(envs, a, b)) return;
  if (a.is(Expr::Kind::Func) && b.is(Expr::Kind::Func) && a.index() == b.index() &&
      a.index() < envs.funcs.size() && a.args().size() == b.args().size() &&
      envs.funcs[a.index()].domain.size() == a.args().size()) {
    const auto& dom = envs.funcs[a.index()].domain;
    for (std::size_t i = 0; i < dom.size(); ++i) split_into(envs, a.args()[i], b.args()[i], dom[i], out);
    return;
  }
  if (a.is(Expr::Kind::Equal) && b.is(Expr::Kind::Equal) && a.type() == b.type()) {
    split_into(envs, a.lhs(), b.lhs(), a.type(), out);
    split_into(envs, a.rhs(), b.rhs(), a.type(), out);
    return;
  }
  Obligation ob{t, a, b};
  for (const Obligation& o : out)
    if (o == ob) return;
  out.push_back(std::move(ob));
}

}  // namespace

std::vector<Obligation> congruence_split(const Envs& envs, const Expr& a, const Expr& b,
                                         const Tvar& t) {
  std::vector<Obligation> out;
  split_into(envs, a, b, t, out);
  return out;
}

}  // namespace sepref
