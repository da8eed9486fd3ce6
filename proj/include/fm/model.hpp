#pragma once

#include <compare>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "fm/guard.hpp"

namespace fm {

/// The six primitive stages plus the Receive macro stage. A machine carries
/// either {Arrive, Accept} or {Receive}, never both sides.
enum class Stage { Create, Process, Release, Transfer, Arrive, Accept, Receive };

inline constexpr Stage kAllStages[] = {
    Stage::Create,  Stage::Process, Stage::Release, Stage::Transfer,
    Stage::Arrive,  Stage::Accept,  Stage::Receive,
};

std::string_view stage_name(Stage s);
std::optional<Stage> stage_from_name(std::string_view name);

enum class SphereKind { Person, Entity, Location, Channel, Device, Abstract };

std::string_view sphere_kind_name(SphereKind k);
std::optional<SphereKind> sphere_kind_from_name(std::string_view name);

/// An environment things flow through. Spheres nest via `parent` into a
/// forest (person inside hospital inside city, ...).
struct Sphere {
  std::string id;
  std::string name;
  std::optional<std::string> parent;
  SphereKind kind = SphereKind::Abstract;

  friend bool operator==(const Sphere&, const Sphere&) = default;
};

struct ThingType {
  std::string id;
  std::string name;

  friend bool operator==(const ThingType&, const ThingType&) = default;
};

/// Address of one stage slot of one machine.
struct StageRef {
  std::string machine;
  Stage stage = Stage::Create;

  friend auto operator<=>(const StageRef&, const StageRef&) = default;
};

std::string to_string(const StageRef& ref);

/// The flow machine a (sphere, thing type) pair owns: the subset of stages
/// that thing actually passes through there.
struct Machine {
  std::string id;
  std::string sphere;
  std::string thing_type;
  std::set<Stage> stages;

  friend bool operator==(const Machine&, const Machine&) = default;
};

/// Solid arc: a thing moves src -> dst. Never mixes thing types.
struct FlowArc {
  std::string id;
  StageRef src;
  StageRef dst;

  friend bool operator==(const FlowArc&, const FlowArc&) = default;
};

/// Dashed arc: activity at src initiates activity at dst (dst stage must be
/// Create or Process). May cross thing types and spheres.
struct TriggerArc {
  std::string id;
  StageRef src;
  StageRef dst;
  std::optional<Guard> guard;

  friend bool operator==(const TriggerArc&, const TriggerArc&) = default;
};

/// A complete flow diagram. Declaration order is identity-relevant: the
/// validator reports in it and the simulator schedules by it.
struct Model {
  std::vector<Sphere> spheres;
  std::vector<ThingType> thing_types;
  std::vector<Machine> machines;
  std::vector<FlowArc> flows;
  std::vector<TriggerArc> triggers;

  const Sphere* find_sphere(std::string_view id) const;
  const ThingType* find_thing_type(std::string_view id) const;
  const Machine* find_machine(std::string_view id) const;
  const Machine* machine_at(std::string_view sphere, std::string_view thing_type) const;

  friend bool operator==(const Model&, const Model&) = default;
};

/// True when `sphere` equals `root` or sits below it in the parent forest.
/// Cycle-safe: walks at most |spheres| links.
bool sphere_in_subtree(const Model& m, std::string_view sphere, std::string_view root);

/// Normal form used for structural comparison: spheres in depth-first order,
/// machines grouped by sphere, thing types in first-use order (orphans
/// dropped), machine ids rewritten to sphere.thing, arc ids to f#/t#.
Model canonical(const Model& m);

/// Equality up to canonical(): what two diagrams share when they draw the
/// same picture.
bool structurally_equal(const Model& a, const Model& b);

}  // namespace fm
