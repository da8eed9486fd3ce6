#pragma once

#include <map>
#include <string>
#include <vector>

#include "fm/pii/registry.hpp"
#include "fm/policy/policy.hpp"
#include "fm/sim/sim.hpp"

namespace fm::policy {

/// One finding: the arc (static check) or event (trace check) that breaks the
/// policy, with a sentence saying why.
struct Violation {
  std::string policy;
  std::string evidence_kind;  // "arc" or "event"
  std::string evidence;       // arc id, or event id as decimal text
  std::string explanation;

  friend bool operator==(const Violation&, const Violation&) = default;
};

/// Everything the trace checker may consult beyond the trace itself. Any
/// field may be null/empty; checks degrade to what the trace carries.
struct PiiContext {
  const pii::Registry* registry = nullptr;
  const Model* model = nullptr;
  /// event id -> referent person ids, overriding the payload's own tags.
  std::map<long long, std::vector<std::string>> referents_override;
};

/// Static analysis of the model's arc structure (CutOffSources, Solitude).
std::vector<Violation> check_model(const Model& m, const Policy& p,
                                   const pii::Registry* reg = nullptr);

/// Replays a recorded trace against the policy (SelfControlledRelease,
/// ContextProhibition).
std::vector<Violation> check_trace(const sim::Trace& trace, const Policy& p,
                                   const PiiContext& ctx);

std::string violations_to_json_text(const std::vector<Violation>& vs);

}  // namespace fm::policy
