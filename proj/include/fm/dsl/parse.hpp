#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "fm/dsl/diagnostics.hpp"
#include "fm/model.hpp"
#include "fm/pii/assertion.hpp"
#include "fm/policy/policy.hpp"
#include "fm/sim/sim.hpp"

namespace fm::dsl {

/// value is set when the input was usable; diagnostics may still carry
/// warnings (or, with no value, the errors). Parsers never throw on bad
/// input.
template <typename T>
struct ParseResult {
  std::optional<T> value;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return value.has_value(); }
};

ParseResult<Model> parse_model(std::string_view text,
                               std::string_view file = "<model>");

ParseResult<Guard> parse_guard(std::string_view text,
                               std::string_view file = "<guard>");

ParseResult<sim::Scenario> parse_scenario(std::string_view text,
                                          std::string_view file = "<scenario>");

ParseResult<sim::ControlGraph> parse_control(std::string_view text,
                                             std::string_view file = "<control>");

ParseResult<std::vector<policy::Policy>> parse_policies(
    std::string_view text, std::string_view file = "<policy>");

/// First policy of parse_policies; errors if the file declares none.
ParseResult<policy::Policy> parse_policy(std::string_view text,
                                         std::string_view file = "<policy>");

/// One assertion per non-empty line: predicate(args) [truth=T|F], brackets
/// optional. Bad lines become diagnostics; good lines are kept, ids a0, a1...
struct CorpusResult {
  std::vector<pii::Assertion> assertions;
  std::vector<Diagnostic> diagnostics;

  bool ok() const;  // no Error-severity diagnostics
};

CorpusResult parse_assertions(std::string_view text,
                              std::string_view file = "<corpus>");

}  // namespace fm::dsl
