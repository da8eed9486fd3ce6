#include "fm/model_json.hpp"

#include "fm/dsl/parse.hpp"
#include "fm/error.hpp"

namespace fm {

namespace {

using nlohmann::ordered_json;

ordered_json ref_to_json(const StageRef& ref) {
  return ordered_json{{"machine", ref.machine}, {"stage", stage_name(ref.stage)}};
}

StageRef ref_from_json(const ordered_json& j, const char* where) {
  if (!j.is_object() || !j.contains("machine") || !j.contains("stage")) {
    throw Error(std::string("model json: malformed stage reference in ") + where);
  }
  StageRef ref;
  ref.machine = j.at("machine").get<std::string>();
  auto stage = stage_from_name(j.at("stage").get<std::string>());
  if (!stage.has_value()) {
    throw Error(std::string("model json: unknown stage in ") + where);
  }
  ref.stage = *stage;
  return ref;
}

const ordered_json& member(const ordered_json& j, const char* key, const char* where) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(std::string("model json: missing '") + key + "' in " + where);
  }
  return j.at(key);
}

}  // namespace

ordered_json model_to_json(const Model& m) {
  ordered_json j;
  j["spheres"] = ordered_json::array();
  for (const auto& s : m.spheres) {
    ordered_json e;
    e["id"] = s.id;
    e["name"] = s.name;
    e["kind"] = sphere_kind_name(s.kind);
    e["parent"] = s.parent.has_value() ? ordered_json(*s.parent) : ordered_json(nullptr);
    j["spheres"].push_back(std::move(e));
  }
  j["thing_types"] = ordered_json::array();
  for (const auto& t : m.thing_types) {
    j["thing_types"].push_back(ordered_json{{"id", t.id}, {"name", t.name}});
  }
  j["machines"] = ordered_json::array();
  for (const auto& mc : m.machines) {
    ordered_json e;
    e["id"] = mc.id;
    e["sphere"] = mc.sphere;
    e["thing_type"] = mc.thing_type;
    e["stages"] = ordered_json::array();
    for (Stage s : mc.stages) e["stages"].push_back(stage_name(s));
    j["machines"].push_back(std::move(e));
  }
  j["flows"] = ordered_json::array();
  for (const auto& arc : m.flows) {
    j["flows"].push_back(ordered_json{
        {"id", arc.id}, {"src", ref_to_json(arc.src)}, {"dst", ref_to_json(arc.dst)}});
  }
  j["triggers"] = ordered_json::array();
  for (const auto& arc : m.triggers) {
    ordered_json e;
    e["id"] = arc.id;
    e["src"] = ref_to_json(arc.src);
    e["dst"] = ref_to_json(arc.dst);
    e["guard"] = arc.guard.has_value() ? ordered_json(arc.guard->text()) : ordered_json(nullptr);
    j["triggers"].push_back(std::move(e));
  }
  return j;
}

Model model_from_json(const ordered_json& j) {
  Model m;
  for (const auto& e : member(j, "spheres", "model")) {
    Sphere s;
    s.id = member(e, "id", "sphere").get<std::string>();
    s.name = member(e, "name", "sphere").get<std::string>();
    auto kind = sphere_kind_from_name(member(e, "kind", "sphere").get<std::string>());
    if (!kind.has_value()) throw Error("model json: unknown sphere kind");
    s.kind = *kind;
    const auto& parent = member(e, "parent", "sphere");
    if (!parent.is_null()) s.parent = parent.get<std::string>();
    m.spheres.push_back(std::move(s));
  }
  for (const auto& e : member(j, "thing_types", "model")) {
    m.thing_types.push_back(ThingType{member(e, "id", "thing type").get<std::string>(),
                                      member(e, "name", "thing type").get<std::string>()});
  }
  for (const auto& e : member(j, "machines", "model")) {
    Machine mc;
    mc.id = member(e, "id", "machine").get<std::string>();
    mc.sphere = member(e, "sphere", "machine").get<std::string>();
    mc.thing_type = member(e, "thing_type", "machine").get<std::string>();
    for (const auto& s : member(e, "stages", "machine")) {
      auto stage = stage_from_name(s.get<std::string>());
      if (!stage.has_value()) throw Error("model json: unknown stage in machine");
      mc.stages.insert(*stage);
    }
    m.machines.push_back(std::move(mc));
  }
  for (const auto& e : member(j, "flows", "model")) {
    FlowArc arc;
    arc.id = member(e, "id", "flow").get<std::string>();
    arc.src = ref_from_json(member(e, "src", "flow"), "flow");
    arc.dst = ref_from_json(member(e, "dst", "flow"), "flow");
    m.flows.push_back(std::move(arc));
  }
  for (const auto& e : member(j, "triggers", "model")) {
    TriggerArc arc;
    arc.id = member(e, "id", "trigger").get<std::string>();
    arc.src = ref_from_json(member(e, "src", "trigger"), "trigger");
    arc.dst = ref_from_json(member(e, "dst", "trigger"), "trigger");
    const auto& guard = member(e, "guard", "trigger");
    if (!guard.is_null()) {
      auto parsed = dsl::parse_guard(guard.get<std::string>());
      if (!parsed.ok()) throw Error("model json: malformed guard text");
      arc.guard = std::move(*parsed.value);
    }
    m.triggers.push_back(std::move(arc));
  }
  return m;
}

std::string model_to_json_text(const Model& m) { return model_to_json(m).dump(2) + "\n"; }

Model model_from_json_text(const std::string& text) {
  ordered_json j = ordered_json::parse(text, nullptr, false);
  if (j.is_discarded()) throw Error("model json: not valid JSON");
  return model_from_json(j);
}

}  // namespace fm
