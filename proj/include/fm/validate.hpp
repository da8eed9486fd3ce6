#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "fm/model.hpp"

namespace fm {

namespace rules {
inline constexpr std::string_view kDuplicateId = "DUPLICATE_ID";
inline constexpr std::string_view kDanglingRef = "DANGLING_REF";
inline constexpr std::string_view kSphereCycle = "SPHERE_CYCLE";
inline constexpr std::string_view kEmptyStages = "EMPTY_STAGES";
inline constexpr std::string_view kReceiveExclusion = "RECEIVE_EXCLUSION";
inline constexpr std::string_view kDuplicateMachine = "DUPLICATE_MACHINE";
inline constexpr std::string_view kUndeclaredStage = "UNDECLARED_STAGE";
inline constexpr std::string_view kMixedFlow = "MIXED_FLOW";
inline constexpr std::string_view kIllegalAdjacency = "ILLEGAL_ADJACENCY";
inline constexpr std::string_view kTriggerDst = "TRIGGER_DST";
}  // namespace rules

/// One legal stage-to-stage flow step, with where it may occur.
struct Adjacency {
  Stage from;
  Stage to;
  bool intra;  // allowed inside one machine
  bool cross;  // allowed between machines
};

using AdjacencyTable = std::vector<Adjacency>;

/// The default legal-flow table. Cross-machine flow leaves through Transfer
/// only (Transfer->Transfer, Transfer->Arrive, Transfer->Receive); everything
/// else is machine-internal. Swap in another table to adjust the calculus
/// without touching the validator.
const AdjacencyTable& default_adjacency();

bool adjacency_allows(const AdjacencyTable& table, Stage from, Stage to, bool cross_machine);

struct Violation {
  std::string rule;
  std::string location;
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }

  friend bool operator==(const ValidationReport&, const ValidationReport&) = default;
};

/// Pure check of every model invariant. Collects violations exhaustively,
/// ordered by declaration order; never mutates or throws on bad input.
ValidationReport validate(const Model& m);
ValidationReport validate(const Model& m, const AdjacencyTable& table);

}  // namespace fm
