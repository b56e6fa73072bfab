#include "sepref/value.hpp"

#include <array>
#include <sstream>

namespace sepref {

Carrier carrier_of(const Value& v) {
  switch (v.index()) {
    case 0: return Carrier::Word;
    case 1: return Carrier::Bool;
    case 2: return Carrier::Nat;
    case 3: return Carrier::WordSeq;
    default: return Carrier::Prop;
  }
}

std::string_view carrier_name(Carrier c) {
  switch (c) {
    case Carrier::Word: return "word";
    case Carrier::Bool: return "bool";
    case Carrier::Nat: return "nat";
    case Carrier::WordSeq: return "seq";
    case Carrier::Prop: return "prop";
  }
  return "?";
}

std::string to_string(const Value& v) {
  struct Printer {
    std::string operator()(const Word& w) const { return std::to_string(w.v); }
    std::string operator()(const Bool& b) const { return b.v ? "true" : "false"; }
    std::string operator()(const Nat& n) const { return std::to_string(n.v); }
    std::string operator()(const PropV& p) const { return p.v ? "True" : "False"; }
    std::string operator()(const WordSeq& s) const {
      std::ostringstream out;
      out << '[';
      for (std::size_t i = 0; i < s.ws.size(); ++i) out << (i ? ", " : "") << s.ws[i];
      out << ']';
      return out.str();
    }
  };
  return std::visit(Printer{}, v);
}

namespace {

template <class T>
bool same_alt(const Value& a, const Value& b) {
  const T* x = std::get_if<T>(&a);
  const T* y = std::get_if<T>(&b);
  return x && y && *x == *y;
}

constexpr std::array kTesters{
    EqTester{"word_eq", Carrier::Word, &same_alt<Word>},
    EqTester{"bool_eq", Carrier::Bool, &same_alt<Bool>},
    EqTester{"nat_eq", Carrier::Nat, &same_alt<Nat>},
    EqTester{"seq_eq", Carrier::WordSeq, &same_alt<WordSeq>},
    EqTester{"prop_eq", Carrier::Prop, &same_alt<PropV>},
};

}  // namespace

const EqTester* find_eq_test(std::string_view name) {
  for (const auto& t : kTesters)
    if (t.name == name) return &t;
  return nullptr;
}

}  // namespace sepref
