#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace fm::pii {

/// A natural person known to the registry. `descriptors` are the attribute
/// values on file that can single the person out (name fragments, license
/// plates, addresses, ...).
struct Person {
  std::string id;
  std::string sphere;
  std::set<std::string> descriptors;

  friend bool operator==(const Person&, const Person&) = default;
};

/// A non-person subject a name can refer to (an airport, a company, a pet).
struct EntityRec {
  std::string id;
  std::string kind;

  friend bool operator==(const EntityRec&, const EntityRec&) = default;
};

/// Membership list used by group-scoped policies.
struct Group {
  std::string id;
  std::vector<std::string> members;  // person ids

  friend bool operator==(const Group&, const Group&) = default;
};

/// A contextual naming convention: within `sphere` (empty = everywhere),
/// `name` refers to `target`. target_is_person tells which table to look in.
struct Binding {
  std::string sphere;
  std::string name;
  std::string target;
  bool target_is_person = true;

  friend bool operator==(const Binding&, const Binding&) = default;
};

enum class IdentifyResult { Unknown, Unique, Ambiguous };

struct Identification {
  IdentifyResult result = IdentifyResult::Unknown;
  std::string person;               // set when result == Unique
  std::vector<std::string> matches;  // all candidate person ids

  friend bool operator==(const Identification&, const Identification&) = default;
};

/// What an argument name resolved to.
struct NameResolution {
  enum class Kind { Person, Entity, Unresolved };
  Kind kind = Kind::Unresolved;
  std::string target;  // person or entity id

  friend bool operator==(const NameResolution&, const NameResolution&) = default;
};

struct Registry {
  std::vector<Person> persons;
  std::vector<EntityRec> entities;
  std::vector<Group> groups;
  std::vector<Binding> bindings;
  std::string default_sphere;

  const Person* find_person(std::string_view id) const;
  const EntityRec* find_entity(std::string_view id) const;
  const Group* find_group(std::string_view id) const;
  const Binding* find_binding(std::string_view sphere,
                              std::string_view name) const;

  /// True when the person is a member of the group (unknown group = false).
  bool in_group(std::string_view group, std::string_view person) const;

  friend bool operator==(const Registry&, const Registry&) = default;
};

/// Recognition by attributes: who has *all* of the queried descriptors on
/// file? Unique means exactly one person matches.
Identification identify(const std::set<std::string>& query,
                        std::string_view sphere, const Registry& reg);

/// Resolves a name as used inside `sphere`: sphere-local binding first, then
/// the global binding, then descriptor recognition on the name itself, then a
/// literal person-id match.
NameResolution resolve_name(std::string_view name, std::string_view sphere,
                            const Registry& reg);

/// Structural checks: duplicate ids, group members that do not exist,
/// bindings pointing nowhere. Returns human-readable problems; empty = ok.
std::vector<std::string> validate(const Registry& reg);

Registry registry_from_json_text(const std::string& text);
std::string registry_to_json_text(const Registry& reg);

}  // namespace fm::pii
