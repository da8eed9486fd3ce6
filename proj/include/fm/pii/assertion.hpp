#pragma once

#include <string>
#include <vector>

namespace fm::pii {

/// One argument of an atomic assertion.
struct Term {
  enum class Kind { Symbol, Int };
  Kind kind = Kind::Symbol;
  std::string text;
  long long ival = 0;
  bool quoted = false;

  friend bool operator==(const Term&, const Term&) = default;
};

enum class Truth { True, False, Unknown };

/// An atomic statement predicate(arg0, ..., argN) with an optional recorded
/// truth value. `text` keeps the raw source line for reporting.
struct Assertion {
  std::string id;
  std::string text;
  std::string predicate;
  std::vector<Term> arguments;
  Truth truth = Truth::Unknown;

  friend bool operator==(const Assertion&, const Assertion&) = default;
};

/// Canonical bracketed rendering: predicate(a, b) [truth=T].
std::string render(const Assertion& a);

}  // namespace fm::pii
