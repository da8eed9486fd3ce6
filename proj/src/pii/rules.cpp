#include "fm/pii/rules.hpp"

#include "fm/pii/assertion.hpp"
#include "fm/pii/classify.hpp"

namespace fm::pii {

const TrivialityRules& default_triviality_rules() {
  static const TrivialityRules rules{
      {"is", "equals", "same_as"},
      {"has_two_hands", "is_human", "is_a_human_being", "is_mortal"},
  };
  return rules;
}

bool is_trivial(const Assertion& a, const TrivialityRules& rules) {
  if (rules.analytic_predicates.count(a.predicate) != 0) return true;
  if (rules.identity_predicates.count(a.predicate) != 0 &&
      a.arguments.size() >= 2) {
    const Term& first = a.arguments.front();
    bool all_equal = true;
    for (const auto& t : a.arguments) {
      if (t.kind != first.kind || t.text != first.text) {
        all_equal = false;
        break;
      }
    }
    if (all_equal) return true;
  }
  return false;
}

std::string_view handling_name(Handling h) {
  switch (h) {
    case Handling::Collect: return "collect";
    case Handling::Process: return "process";
    case Handling::Disclose: return "disclose";
    case Handling::Store: return "store";
    case Handling::Transfer: return "transfer";
  }
  return "process";
}

std::optional<Handling> handling_from_name(std::string_view name) {
  for (Handling h : {Handling::Collect, Handling::Process, Handling::Disclose,
                     Handling::Store, Handling::Transfer}) {
    if (handling_name(h) == name) return h;
  }
  return std::nullopt;
}

std::string_view level_name(Level l) {
  switch (l) {
    case Level::None: return "none";
    case Level::Low: return "low";
    case Level::Moderate: return "moderate";
    case Level::High: return "high";
  }
  return "none";
}

std::optional<Level> level_from_name(std::string_view name) {
  for (Level l : {Level::None, Level::Low, Level::Moderate, Level::High}) {
    if (level_name(l) == name) return l;
  }
  return std::nullopt;
}

const SensitivityPolicy& default_sensitivity_policy() {
  static const SensitivityPolicy policy = [] {
    SensitivityPolicy p;
    p.category_map = {
        {"medical_record", "medical"}, {"diagnosis", "medical"},
        {"disease", "medical"},        {"salary", "financial"},
        {"bank_balance", "financial"}, {"owes", "financial"},
        {"fingerprint", "biometric"},  {"faceprint", "biometric"},
        {"email", "contact"},          {"phone", "contact"},
        {"address", "contact"},        {"likes", "preference"},
        {"dislikes", "preference"},    {"in_love", "preference"},
    };
    auto set = [&p](const std::string& cat, Handling h, Level l) {
      p.table[{cat, h}] = l;
    };
    set("medical", Handling::Collect, Level::Moderate);
    set("medical", Handling::Process, Level::Moderate);
    set("medical", Handling::Disclose, Level::High);
    set("medical", Handling::Store, Level::Moderate);
    set("medical", Handling::Transfer, Level::High);
    set("financial", Handling::Collect, Level::Moderate);
    set("financial", Handling::Process, Level::Low);
    set("financial", Handling::Disclose, Level::High);
    set("financial", Handling::Store, Level::Moderate);
    set("financial", Handling::Transfer, Level::High);
    set("biometric", Handling::Collect, Level::High);
    set("biometric", Handling::Process, Level::Moderate);
    set("biometric", Handling::Disclose, Level::High);
    set("biometric", Handling::Store, Level::High);
    set("biometric", Handling::Transfer, Level::High);
    set("contact", Handling::Collect, Level::Low);
    set("contact", Handling::Process, Level::Low);
    set("contact", Handling::Disclose, Level::Moderate);
    set("contact", Handling::Store, Level::Low);
    set("contact", Handling::Transfer, Level::Moderate);
    set("preference", Handling::Collect, Level::Low);
    set("preference", Handling::Process, Level::Low);
    set("preference", Handling::Disclose, Level::Moderate);
    set("preference", Handling::Store, Level::Low);
    set("preference", Handling::Transfer, Level::Low);
    p.default_level = Level::Low;
    return p;
  }();
  return policy;
}

SensitivityResult sensitivity(const PIIRecord& record, Handling h,
                              const SensitivityPolicy& policy) {
  SensitivityResult out;
  if (record.trivial || record.cls == PiiClass::NotPII) {
    out.level = Level::None;
    return out;
  }
  auto cat = policy.category_map.find(record.predicate);
  if (cat == policy.category_map.end()) {
    out.level = policy.default_level;
    out.warning = "predicate '" + record.predicate +
                  "' has no sensitivity category; using the default level";
    return out;
  }
  out.category = cat->second;
  auto cell = policy.table.find({cat->second, h});
  out.level = cell != policy.table.end() ? cell->second : policy.default_level;
  return out;
}

}  // namespace fm::pii
