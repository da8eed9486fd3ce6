#pragma once

#include <map>
#include <memory>
#include <string>

namespace fm {

/// Boolean expression over integer counters: comparisons combined with
/// and / or / not. Values are immutable; copies share structure.
class Guard {
 public:
  enum class Cmp { Eq, Ne, Lt, Le, Gt, Ge };

  /// A comparison side: either a counter reference or an integer literal.
  struct Operand {
    bool is_counter = false;
    std::string counter;
    long long value = 0;

    friend bool operator==(const Operand&, const Operand&) = default;
  };

  using Counters = std::map<std::string, long long>;

  static Operand counter_ref(std::string name);
  static Operand literal(long long value);

  static Guard compare(Operand lhs, Cmp op, Operand rhs);
  /// Shorthand for the common `counter <op> literal` form.
  static Guard counter_cmp(std::string counter, Cmp op, long long value);
  static Guard conj(Guard a, Guard b);
  static Guard disj(Guard a, Guard b);
  static Guard negate(Guard inner);

  /// Counters absent from the map evaluate as 0.
  bool eval(const Counters& counters) const;

  /// Canonical text form; parsing it yields an equal guard.
  std::string text() const;

  friend bool operator==(const Guard& a, const Guard& b);

  /// Expression tree node; opaque outside the implementation.
  struct Node;

 private:
  explicit Guard(std::shared_ptr<const Node> root) : root_(std::move(root)) {}
  std::shared_ptr<const Node> root_;
};

std::string to_string(Guard::Cmp op);

}  // namespace fm
