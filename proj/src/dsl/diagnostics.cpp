#include "fm/dsl/diagnostics.hpp"

#include <algorithm>
#include <tuple>

namespace fm::dsl {

void sort_diagnostics(std::vector<Diagnostic>& diags) {
  std::stable_sort(diags.begin(), diags.end(),
                   [](const Diagnostic& a, const Diagnostic& b) {
                     return std::tie(a.span.file, a.span.line, a.span.column) <
                            std::tie(b.span.file, b.span.line, b.span.column);
                   });
}

std::string format_diagnostic(const Diagnostic& d) {
  std::string out = d.span.file + ":" + std::to_string(d.span.line) + ":" +
                    std::to_string(d.span.column) + ": ";
  out += d.severity == Severity::Error ? "error: " : "warning: ";
  out += d.code;
  out += ": ";
  out += d.message;
  return out;
}

}  // namespace fm::dsl
