#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace sepref {

// Concrete carriers of the finite-heap model. Words wrap modulo 2^32.
struct Word {
  std::uint32_t v = 0;
  auto operator<=>(const Word&) const = default;
};
struct Bool {
  bool v = false;
  auto operator<=>(const Bool&) const = default;
};
struct Nat {
  std::uint64_t v = 0;
  auto operator<=>(const Nat&) const = default;
};
struct WordSeq {
  std::vector<std::uint32_t> ws;
  auto operator<=>(const WordSeq&) const = default;
};
struct PropV {
  bool v = false;
  auto operator<=>(const PropV&) const = default;
};

using Value = std::variant<Word, Bool, Nat, WordSeq, PropV>;

enum class Carrier : std::uint8_t { Word, Bool, Nat, WordSeq, Prop };

Carrier carrier_of(const Value& v);
std::string_view carrier_name(Carrier c);
std::string to_string(const Value& v);

using EqFn = bool (*)(const Value&, const Value&);

/// A named value-equality tester. Type declarations refer to these by name;
/// the carrier of a declared type is the carrier of its tester.
struct EqTester {
  std::string_view name;
  Carrier carrier;
  EqFn test;
};

/// Built-in testers: word_eq, bool_eq, nat_eq, seq_eq, prop_eq.
const EqTester* find_eq_test(std::string_view name);

}  // namespace sepref
