#include "fm/pii/assertion.hpp"

namespace fm::pii {

std::string render(const Assertion& a) {
  std::string out = a.predicate + "(";
  bool first = true;
  for (const auto& term : a.arguments) {
    if (!first) out += ", ";
    first = false;
    if (term.quoted) {
      out += '"';
      for (char c : term.text) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
      }
      out += '"';
    } else {
      out += term.text;
    }
  }
  out += ")";
  if (a.truth == Truth::True) out += " [truth=T]";
  if (a.truth == Truth::False) out += " [truth=F]";
  return out;
}

}  // namespace fm::pii
