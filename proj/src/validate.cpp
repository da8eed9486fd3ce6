#include "fm/validate.hpp"

#include <map>
#include <set>
#include <string>

namespace fm {

const AdjacencyTable& default_adjacency() {
  static const AdjacencyTable table = {
      {Stage::Create, Stage::Release, true, false},
      {Stage::Create, Stage::Process, true, false},
      {Stage::Process, Stage::Release, true, false},
      {Stage::Release, Stage::Transfer, true, false},
      {Stage::Transfer, Stage::Transfer, false, true},
      {Stage::Transfer, Stage::Arrive, true, true},
      {Stage::Transfer, Stage::Receive, true, true},
      {Stage::Arrive, Stage::Accept, true, false},
      {Stage::Accept, Stage::Process, true, false},
      {Stage::Accept, Stage::Release, true, false},
      {Stage::Receive, Stage::Process, true, false},
      {Stage::Receive, Stage::Release, true, false},
  };
  return table;
}

bool adjacency_allows(const AdjacencyTable& table, Stage from, Stage to, bool cross_machine) {
  for (const auto& a : table) {
    if (a.from != from || a.to != to) continue;
    if (cross_machine ? a.cross : a.intra) return true;
  }
  return false;
}

namespace {

void add(ValidationReport& report, std::string_view rule, std::string location,
         std::string message) {
  report.violations.push_back(
      Violation{std::string(rule), std::move(location), std::move(message)});
}

}  // namespace

ValidationReport validate(const Model& m) { return validate(m, default_adjacency()); }

ValidationReport validate(const Model& m, const AdjacencyTable& table) {
  ValidationReport report;

  std::set<std::string> sphere_ids;
  for (const auto& s : m.spheres) {
    std::string loc = "sphere " + s.id;
    if (!sphere_ids.insert(s.id).second) {
      add(report, rules::kDuplicateId, loc, "sphere id declared more than once");
    }
    if (s.parent.has_value() && m.find_sphere(*s.parent) == nullptr) {
      add(report, rules::kDanglingRef, loc, "parent sphere '" + *s.parent + "' not declared");
    }
  }
  // A sphere is on a cycle when walking its parent chain returns to it.
  for (const auto& s : m.spheres) {
    const Sphere* cur = &s;
    for (std::size_t hops = 0; hops < m.spheres.size(); ++hops) {
      if (!cur->parent.has_value()) { cur = nullptr; break; }
      cur = m.find_sphere(*cur->parent);
      if (cur == nullptr) break;
      if (cur->id == s.id) break;
    }
    if (cur != nullptr && cur->id == s.id) {
      add(report, rules::kSphereCycle, "sphere " + s.id,
          "sphere parent chain loops back to '" + s.id + "'");
    }
  }

  std::set<std::string> type_ids;
  for (const auto& t : m.thing_types) {
    if (!type_ids.insert(t.id).second) {
      add(report, rules::kDuplicateId, "thing type " + t.id,
          "thing type id declared more than once");
    }
  }

  std::set<std::string> machine_ids;
  std::set<std::pair<std::string, std::string>> machine_slots;
  for (const auto& mc : m.machines) {
    std::string loc = "machine " + mc.id;
    if (!machine_ids.insert(mc.id).second) {
      add(report, rules::kDuplicateId, loc, "machine id declared more than once");
    }
    if (m.find_sphere(mc.sphere) == nullptr) {
      add(report, rules::kDanglingRef, loc, "sphere '" + mc.sphere + "' not declared");
    }
    if (m.find_thing_type(mc.thing_type) == nullptr) {
      add(report, rules::kDanglingRef, loc, "thing type '" + mc.thing_type + "' not declared");
    }
    if (mc.stages.empty()) {
      add(report, rules::kEmptyStages, loc, "machine declares no stages");
    }
    if (mc.stages.contains(Stage::Receive) &&
        (mc.stages.contains(Stage::Arrive) || mc.stages.contains(Stage::Accept))) {
      add(report, rules::kReceiveExclusion, loc,
          "Receive is the combined stage and excludes Arrive/Accept");
    }
    if (!machine_slots.insert({mc.sphere, mc.thing_type}).second) {
      add(report, rules::kDuplicateMachine, loc,
          "second machine for (" + mc.sphere + ", " + mc.thing_type + ")");
    }
  }

  auto check_endpoint = [&](ValidationReport& rep, const std::string& loc, const StageRef& ref,
                            const char* side) -> const Machine* {
    const Machine* mc = m.find_machine(ref.machine);
    if (mc == nullptr) {
      add(rep, rules::kDanglingRef, loc,
          std::string(side) + " machine '" + ref.machine + "' not declared");
      return nullptr;
    }
    if (!mc->stages.contains(ref.stage)) {
      add(rep, rules::kUndeclaredStage, loc,
          std::string(side) + " stage " + std::string(stage_name(ref.stage)) +
              " not declared by machine '" + ref.machine + "'");
    }
    return mc;
  };

  std::set<std::string> flow_ids;
  for (const auto& arc : m.flows) {
    std::string loc = "flow " + arc.id;
    if (!flow_ids.insert(arc.id).second) {
      add(report, rules::kDuplicateId, loc, "flow id declared more than once");
    }
    const Machine* src = check_endpoint(report, loc, arc.src, "source");
    const Machine* dst = check_endpoint(report, loc, arc.dst, "destination");
    if (src == nullptr || dst == nullptr) continue;
    if (src->thing_type != dst->thing_type) {
      add(report, rules::kMixedFlow, loc,
          "flow mixes thing types '" + src->thing_type + "' and '" + dst->thing_type + "'");
    }
    bool cross = src->id != dst->id;
    if (!adjacency_allows(table, arc.src.stage, arc.dst.stage, cross)) {
      add(report, rules::kIllegalAdjacency, loc,
          std::string(stage_name(arc.src.stage)) + " -> " +
              std::string(stage_name(arc.dst.stage)) +
              (cross ? " is not a legal cross-machine flow step"
                     : " is not a legal flow step inside one machine"));
    }
  }

  std::set<std::string> trigger_ids;
  for (const auto& arc : m.triggers) {
    std::string loc = "trigger " + arc.id;
    if (!trigger_ids.insert(arc.id).second) {
      add(report, rules::kDuplicateId, loc, "trigger id declared more than once");
    }
    check_endpoint(report, loc, arc.src, "source");
    const Machine* dst = check_endpoint(report, loc, arc.dst, "destination");
    if (dst != nullptr && arc.dst.stage != Stage::Create && arc.dst.stage != Stage::Process) {
      add(report, rules::kTriggerDst, loc,
          "trigger destination must be Create or Process, got " +
              std::string(stage_name(arc.dst.stage)));
    }
  }

  return report;
}

}  // namespace fm
