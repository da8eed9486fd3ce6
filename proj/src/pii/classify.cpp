#include "fm/pii/classify.hpp"

#include <algorithm>

#include "fm/error.hpp"

namespace fm::pii {

namespace {

bool personlike(const Term& t) {
  return t.kind == Term::Kind::Symbol && !t.quoted && !t.text.empty() &&
         t.text.front() >= 'A' && t.text.front() <= 'Z';
}

/// Person id the term resolves to, or empty.
std::string resolve_term(const Term& t, std::string_view sphere,
                         const Registry& reg) {
  if (t.kind != Term::Kind::Symbol) return {};
  NameResolution r = resolve_name(t.text, sphere, reg);
  return r.kind == NameResolution::Kind::Person ? r.target : std::string();
}

}  // namespace

std::string_view pii_class_name(PiiClass c) {
  switch (c) {
    case PiiClass::NotPII: return "NotPII";
    case PiiClass::Atomic: return "APII";
    case PiiClass::Compound: return "CPII";
  }
  return "NotPII";
}

ClassifyOutcome classify(const Assertion& a, std::string_view sphere,
                         const Registry& reg, const TrivialityRules& rules) {
  std::string eff(sphere.empty() ? std::string_view(reg.default_sphere) : sphere);
  ClassifyOutcome out;
  out.record.assertion_id = a.id;
  out.record.predicate = a.predicate;
  for (const auto& term : a.arguments) {
    if (term.kind != Term::Kind::Symbol) continue;
    NameResolution r = resolve_name(term.text, eff, reg);
    if (r.kind == NameResolution::Kind::Person) {
      auto& referents = out.record.referents;
      if (std::find(referents.begin(), referents.end(), r.target) ==
          referents.end())
        referents.push_back(r.target);
    } else if (r.kind == NameResolution::Kind::Unresolved && personlike(term)) {
      out.warnings.push_back("argument '" + term.text +
                             "' looks like a person name but resolves to nobody");
    }
  }
  out.record.arity = static_cast<int>(out.record.referents.size());
  if (out.record.arity == 0) {
    out.record.cls = PiiClass::NotPII;
  } else if (out.record.arity == 1) {
    out.record.cls = PiiClass::Atomic;
  } else {
    out.record.cls = PiiClass::Compound;
  }
  out.record.trivial = is_trivial(a, rules);
  return out;
}

Reduction reduce(const Assertion& a, const PIIRecord& record,
                 std::string_view sphere, const Registry& reg,
                 const TrivialityRules& rules) {
  if (record.cls != PiiClass::Compound)
    throw ContractError("reduce: record '" + record.assertion_id +
                        "' is not compound (CPII)");
  std::string eff(sphere.empty() ? std::string_view(reg.default_sphere) : sphere);

  // Which argument positions hold persons, and which person.
  std::vector<std::string> arg_person(a.arguments.size());
  std::vector<std::size_t> person_positions;
  for (std::size_t i = 0; i < a.arguments.size(); ++i) {
    arg_person[i] = resolve_term(a.arguments[i], eff, reg);
    if (!arg_person[i].empty()) person_positions.push_back(i);
  }

  Reduction out;
  out.relationship = a.predicate;
  for (const auto& referent : record.referents) {
    Assertion component = a;
    component.id = a.id + "." + referent;
    for (std::size_t i = 0; i < component.arguments.size(); ++i) {
      if (!arg_person[i].empty() && arg_person[i] != referent) {
        Term& t = component.arguments[i];
        t.kind = Term::Kind::Symbol;
        t.text = "someone";
        t.quoted = false;
        t.ival = 0;
      }
    }
    component.text = render(component);

    std::size_t first = 0;
    for (std::size_t i = 0; i < a.arguments.size(); ++i) {
      if (arg_person[i] == referent) {
        first = i;
        break;
      }
    }
    std::string role;
    if (!person_positions.empty() && first == person_positions.front()) {
      role = "subject";
    } else if (!person_positions.empty() && first == person_positions.back()) {
      role = "object";
    } else {
      role = "arg" + std::to_string(first);
    }

    ReductionComponent rc;
    rc.assertion = component;
    rc.record = classify(component, eff, reg, rules).record;
    rc.role = std::move(role);
    rc.referent = referent;
    out.components.push_back(std::move(rc));
  }
  return out;
}

}  // namespace fm::pii
