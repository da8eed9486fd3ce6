#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "fm/model.hpp"

namespace fm::policy {

/// CutOffSources: flag paths that turn the subject's raw signals into stored
/// identifiers. SelfControlledRelease: only the subject's own spheres may
/// release information about them. Solitude: no flows across the subject's
/// sphere boundary at all. ContextProhibition: a concrete deny rule over
/// who/what/where/when.
enum class PolicyKind {
  CutOffSources,
  SelfControlledRelease,
  Solitude,
  ContextProhibition,
};

std::string_view policy_kind_name(PolicyKind k);

/// Who a context rule restricts: one person or a whole group.
struct IdentitySel {
  bool is_group = false;
  std::string id;

  friend bool operator==(const IdentitySel&, const IdentitySel&) = default;
};

/// What act is denied: a stage applied to a thing type (create_picture =
/// Create stage of a "picture" machine).
struct ActionSel {
  Stage stage = Stage::Create;
  std::string thing_type;

  friend bool operator==(const ActionSel&, const ActionSel&) = default;
};

/// All present selectors must match for the rule to bite.
struct ContextConstraint {
  std::optional<IdentitySel> identity;
  std::optional<ActionSel> action;
  std::optional<std::string> location;  // sphere id or payload location tag
  std::optional<std::string> time;      // payload time tag
  std::optional<std::string> activity;  // payload activity tag

  friend bool operator==(const ContextConstraint&, const ContextConstraint&) = default;
};

struct Policy {
  std::string id;
  PolicyKind kind = PolicyKind::Solitude;
  std::string subject;  // person id (or sphere id when no registry is given)
  ContextConstraint context;
  /// Thing type treated as a durable identifier by CutOffSources.
  std::string identifier_type = "identifier";

  friend bool operator==(const Policy&, const Policy&) = default;
};

}  // namespace fm::policy
