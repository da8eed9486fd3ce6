#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fm/pii/assertion.hpp"
#include "fm/pii/registry.hpp"
#include "fm/pii/rules.hpp"

namespace fm::pii {

/// NotPII: refers to no identifiable person. Atomic: exactly one. Compound:
/// more than one.
enum class PiiClass { NotPII, Atomic, Compound };

std::string_view pii_class_name(PiiClass c);

/// Classification of one assertion. `referents` are the distinct person ids
/// the arguments resolve to, in first-appearance order; arity is their count.
struct PIIRecord {
  std::string assertion_id;
  std::string predicate;
  std::vector<std::string> referents;
  PiiClass cls = PiiClass::NotPII;
  int arity = 0;
  bool trivial = false;

  friend bool operator==(const PIIRecord&, const PIIRecord&) = default;
};

struct ClassifyOutcome {
  PIIRecord record;
  std::vector<std::string> warnings;

  friend bool operator==(const ClassifyOutcome&, const ClassifyOutcome&) = default;
};

/// Resolves each argument against the registry (as seen from `sphere`) and
/// counts distinct persons. Classification ignores the recorded truth value:
/// a false statement about a person is still about that person. Capitalized
/// arguments that resolve to nobody produce a warning.
ClassifyOutcome classify(const Assertion& a, std::string_view sphere,
                         const Registry& reg,
                         const TrivialityRules& rules = default_triviality_rules());

/// One single-referent component of a reduced compound assertion.
struct ReductionComponent {
  Assertion assertion;
  PIIRecord record;
  std::string role;      // subject, object, or arg<i>
  std::string referent;  // the person this component is about

  friend bool operator==(const ReductionComponent&, const ReductionComponent&) = default;
};

struct Reduction {
  std::vector<ReductionComponent> components;
  std::string relationship;  // the shared predicate

  friend bool operator==(const Reduction&, const Reduction&) = default;
};

/// Splits a compound assertion into one atomic assertion per referent, with
/// every other person argument replaced by "someone". Throws ContractError
/// when the record is not Compound.
Reduction reduce(const Assertion& a, const PIIRecord& record,
                 std::string_view sphere, const Registry& reg,
                 const TrivialityRules& rules = default_triviality_rules());

}  // namespace fm::pii
