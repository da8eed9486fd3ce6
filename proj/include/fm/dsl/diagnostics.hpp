#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace fm::dsl {

/// 1-based position of a token in its source file.
struct SourceSpan {
  std::string file;
  int line = 1;
  int column = 1;
  int length = 0;

  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

enum class Severity { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string code;
  SourceSpan span;
  std::string message;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

namespace diag {
inline constexpr std::string_view UNKNOWN_KEYWORD = "UNKNOWN_KEYWORD";
inline constexpr std::string_view UNEXPECTED_TOKEN = "UNEXPECTED_TOKEN";
inline constexpr std::string_view UNKNOWN_STAGE = "UNKNOWN_STAGE";
inline constexpr std::string_view UNKNOWN_KIND = "UNKNOWN_KIND";
inline constexpr std::string_view UNRESOLVED_REF = "UNRESOLVED_REF";
inline constexpr std::string_view DUPLICATE_ID = "DUPLICATE_ID";
inline constexpr std::string_view MISSING_SUBJECT = "MISSING_SUBJECT";
inline constexpr std::string_view UNTERMINATED_STRING = "UNTERMINATED_STRING";
inline constexpr std::string_view BAD_NUMBER = "BAD_NUMBER";
inline constexpr std::string_view UNEXPECTED_CHAR = "UNEXPECTED_CHAR";
inline constexpr std::string_view TOO_DEEP = "TOO_DEEP";
inline constexpr std::string_view BAD_ACTION = "BAD_ACTION";
}  // namespace diag

/// Orders by (file, line, column), stable for ties.
void sort_diagnostics(std::vector<Diagnostic>& diags);

/// "file:line:col: error: CODE: message" — one line, for CLI output.
std::string format_diagnostic(const Diagnostic& d);

}  // namespace fm::dsl
