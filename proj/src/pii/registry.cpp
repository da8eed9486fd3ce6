#include "fm/pii/registry.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "fm/error.hpp"

namespace fm::pii {

namespace {
using ordered_json = nlohmann::ordered_json;
}

const Person* Registry::find_person(std::string_view id) const {
  for (const auto& p : persons) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

const EntityRec* Registry::find_entity(std::string_view id) const {
  for (const auto& e : entities) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

const Group* Registry::find_group(std::string_view id) const {
  for (const auto& g : groups) {
    if (g.id == id) return &g;
  }
  return nullptr;
}

const Binding* Registry::find_binding(std::string_view sphere,
                                      std::string_view name) const {
  for (const auto& b : bindings) {
    if (b.sphere == sphere && b.name == name) return &b;
  }
  return nullptr;
}

bool Registry::in_group(std::string_view group, std::string_view person) const {
  const Group* g = find_group(group);
  if (g == nullptr) return false;
  return std::find(g->members.begin(), g->members.end(), person) !=
         g->members.end();
}

Identification identify(const std::set<std::string>& query,
                        std::string_view sphere, const Registry& reg) {
  Identification out;
  for (const auto& p : reg.persons) {
    if (!sphere.empty() && p.sphere != sphere) continue;
    bool all = std::all_of(query.begin(), query.end(), [&](const std::string& d) {
      return p.descriptors.count(d) != 0;
    });
    if (all) out.matches.push_back(p.id);
  }
  if (out.matches.empty()) {
    out.result = IdentifyResult::Unknown;
  } else if (out.matches.size() == 1) {
    out.result = IdentifyResult::Unique;
    out.person = out.matches.front();
  } else {
    out.result = IdentifyResult::Ambiguous;
  }
  return out;
}

NameResolution resolve_name(std::string_view name, std::string_view sphere,
                            const Registry& reg) {
  NameResolution out;
  auto from_binding = [&](const Binding* b) {
    if (b == nullptr) return false;
    if (b->target_is_person && reg.find_person(b->target) != nullptr) {
      out.kind = NameResolution::Kind::Person;
      out.target = b->target;
      return true;
    }
    if (!b->target_is_person && reg.find_entity(b->target) != nullptr) {
      out.kind = NameResolution::Kind::Entity;
      out.target = b->target;
      return true;
    }
    return false;
  };
  if (from_binding(reg.find_binding(sphere, name))) return out;
  if (from_binding(reg.find_binding("", name))) return out;

  Identification id = identify({std::string(name)}, sphere, reg);
  if (id.result == IdentifyResult::Unique) {
    out.kind = NameResolution::Kind::Person;
    out.target = id.person;
    return out;
  }

  if (reg.find_person(name) != nullptr) {
    out.kind = NameResolution::Kind::Person;
    out.target = std::string(name);
  }
  return out;
}

std::vector<std::string> validate(const Registry& reg) {
  std::vector<std::string> problems;
  auto dup = [&](const std::string& what, const std::string& id) {
    problems.push_back("duplicate " + what + " '" + id + "'");
  };
  std::set<std::string> seen;
  for (const auto& p : reg.persons) {
    if (!seen.insert(p.id).second) dup("person", p.id);
  }
  seen.clear();
  for (const auto& e : reg.entities) {
    if (!seen.insert(e.id).second) dup("entity", e.id);
  }
  seen.clear();
  for (const auto& g : reg.groups) {
    if (!seen.insert(g.id).second) dup("group", g.id);
    for (const auto& m : g.members) {
      if (reg.find_person(m) == nullptr)
        problems.push_back("group '" + g.id + "' member '" + m +
                           "' is not a registered person");
    }
  }
  std::set<std::pair<std::string, std::string>> bound;
  for (const auto& b : reg.bindings) {
    if (!bound.insert({b.sphere, b.name}).second)
      problems.push_back("duplicate binding for '" + b.name + "' in sphere '" +
                         b.sphere + "'");
    bool found = b.target_is_person ? reg.find_person(b.target) != nullptr
                                    : reg.find_entity(b.target) != nullptr;
    if (!found)
      problems.push_back("binding '" + b.name + "' points at unknown " +
                         (b.target_is_person ? "person" : "entity") + " '" +
                         b.target + "'");
  }
  return problems;
}

Registry registry_from_json_text(const std::string& text) {
  ordered_json j = ordered_json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw Error("registry: not a JSON object");
  Registry reg;
  try {
    reg.default_sphere = j.value("default_sphere", std::string());
    for (const auto& pj : j.value("persons", ordered_json::array())) {
      Person p;
      p.id = pj.at("id").get<std::string>();
      p.sphere = pj.value("sphere", std::string());
      for (const auto& d : pj.value("descriptors", ordered_json::array()))
        p.descriptors.insert(d.get<std::string>());
      reg.persons.push_back(std::move(p));
    }
    for (const auto& ej : j.value("entities", ordered_json::array())) {
      EntityRec e;
      e.id = ej.at("id").get<std::string>();
      e.kind = ej.value("kind", std::string());
      reg.entities.push_back(std::move(e));
    }
    for (const auto& gj : j.value("groups", ordered_json::array())) {
      Group g;
      g.id = gj.at("id").get<std::string>();
      for (const auto& m : gj.value("members", ordered_json::array()))
        g.members.push_back(m.get<std::string>());
      reg.groups.push_back(std::move(g));
    }
    for (const auto& bj : j.value("bindings", ordered_json::array())) {
      Binding b;
      b.sphere = bj.value("sphere", std::string());
      b.name = bj.at("name").get<std::string>();
      b.target = bj.at("target").get<std::string>();
      b.target_is_person = bj.value("target_is_person", true);
      reg.bindings.push_back(std::move(b));
    }
  } catch (const ordered_json::exception& ex) {
    throw Error(std::string("registry: ") + ex.what());
  }
  return reg;
}

std::string registry_to_json_text(const Registry& reg) {
  ordered_json j;
  j["default_sphere"] = reg.default_sphere;
  j["persons"] = ordered_json::array();
  for (const auto& p : reg.persons) {
    ordered_json pj;
    pj["id"] = p.id;
    pj["sphere"] = p.sphere;
    pj["descriptors"] = p.descriptors;
    j["persons"].push_back(std::move(pj));
  }
  j["entities"] = ordered_json::array();
  for (const auto& e : reg.entities) {
    ordered_json ej;
    ej["id"] = e.id;
    ej["kind"] = e.kind;
    j["entities"].push_back(std::move(ej));
  }
  j["groups"] = ordered_json::array();
  for (const auto& g : reg.groups) {
    ordered_json gj;
    gj["id"] = g.id;
    gj["members"] = g.members;
    j["groups"].push_back(std::move(gj));
  }
  j["bindings"] = ordered_json::array();
  for (const auto& b : reg.bindings) {
    ordered_json bj;
    bj["sphere"] = b.sphere;
    bj["name"] = b.name;
    bj["target"] = b.target;
    bj["target_is_person"] = b.target_is_person;
    j["bindings"].push_back(std::move(bj));
  }
  return j.dump(2) + "\n";
}

}  // namespace fm::pii
