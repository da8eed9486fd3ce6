#include "fm/model.hpp"

#include <algorithm>
#include <map>
#include <string>

namespace fm {

std::string_view stage_name(Stage s) {
  switch (s) {
    case Stage::Create: return "Create";
    case Stage::Process: return "Process";
    case Stage::Release: return "Release";
    case Stage::Transfer: return "Transfer";
    case Stage::Arrive: return "Arrive";
    case Stage::Accept: return "Accept";
    case Stage::Receive: return "Receive";
  }
  return "Create";
}

std::optional<Stage> stage_from_name(std::string_view name) {
  for (Stage s : kAllStages) {
    if (stage_name(s) == name) return s;
  }
  return std::nullopt;
}

std::string_view sphere_kind_name(SphereKind k) {
  switch (k) {
    case SphereKind::Person: return "person";
    case SphereKind::Entity: return "entity";
    case SphereKind::Location: return "location";
    case SphereKind::Channel: return "channel";
    case SphereKind::Device: return "device";
    case SphereKind::Abstract: return "abstract";
  }
  return "abstract";
}

std::optional<SphereKind> sphere_kind_from_name(std::string_view name) {
  for (SphereKind k : {SphereKind::Person, SphereKind::Entity, SphereKind::Location,
                       SphereKind::Channel, SphereKind::Device, SphereKind::Abstract}) {
    if (sphere_kind_name(k) == name) return k;
  }
  return std::nullopt;
}

std::string to_string(const StageRef& ref) {
  return ref.machine + "." + std::string(stage_name(ref.stage));
}

const Sphere* Model::find_sphere(std::string_view id) const {
  for (const auto& s : spheres) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

const ThingType* Model::find_thing_type(std::string_view id) const {
  for (const auto& t : thing_types) {
    if (t.id == id) return &t;
  }
  return nullptr;
}

const Machine* Model::find_machine(std::string_view id) const {
  for (const auto& m : machines) {
    if (m.id == id) return &m;
  }
  return nullptr;
}

const Machine* Model::machine_at(std::string_view sphere, std::string_view thing_type) const {
  for (const auto& m : machines) {
    if (m.sphere == sphere && m.thing_type == thing_type) return &m;
  }
  return nullptr;
}

bool sphere_in_subtree(const Model& m, std::string_view sphere, std::string_view root) {
  std::string_view cur = sphere;
  for (std::size_t hops = 0; hops <= m.spheres.size(); ++hops) {
    if (cur == root) return true;
    const Sphere* s = m.find_sphere(cur);
    if (s == nullptr || !s->parent.has_value()) return false;
    cur = *s->parent;
  }
  return false;
}

Model canonical(const Model& m) {
  Model out;

  // Spheres: depth-first, roots and children both in declaration order.
  // Spheres whose parent chain never reaches a root (cycles, dangling
  // parents) are appended afterwards so the result stays total.
  std::map<std::string, std::vector<std::size_t>> children;
  std::vector<std::size_t> roots;
  for (std::size_t i = 0; i < m.spheres.size(); ++i) {
    const auto& s = m.spheres[i];
    if (s.parent.has_value() && m.find_sphere(*s.parent) != nullptr) {
      children[*s.parent].push_back(i);
    } else {
      roots.push_back(i);
    }
  }
  std::vector<bool> visited(m.spheres.size(), false);
  std::vector<std::size_t> stack(roots.rbegin(), roots.rend());
  while (!stack.empty()) {
    std::size_t i = stack.back();
    stack.pop_back();
    if (visited[i]) continue;
    visited[i] = true;
    out.spheres.push_back(m.spheres[i]);
    auto it = children.find(m.spheres[i].id);
    if (it != children.end()) {
      for (auto c = it->second.rbegin(); c != it->second.rend(); ++c) stack.push_back(*c);
    }
  }
  for (std::size_t i = 0; i < m.spheres.size(); ++i) {
    if (!visited[i]) out.spheres.push_back(m.spheres[i]);
  }

  // Machines: grouped by the sphere order above, stable within a sphere.
  std::map<std::string, std::string> machine_rename;
  for (const auto& s : out.spheres) {
    for (const auto& mc : m.machines) {
      if (mc.sphere != s.id) continue;
      Machine copy = mc;
      copy.id = mc.sphere + "." + mc.thing_type;
      machine_rename[mc.id] = copy.id;
      out.machines.push_back(std::move(copy));
    }
  }
  for (const auto& mc : m.machines) {
    if (m.find_sphere(mc.sphere) != nullptr) continue;
    Machine copy = mc;
    copy.id = mc.sphere + "." + mc.thing_type;
    machine_rename[mc.id] = copy.id;
    out.machines.push_back(std::move(copy));
  }

  // Thing types: first-use order over the machine order; orphans dropped.
  for (const auto& mc : out.machines) {
    if (out.find_thing_type(mc.thing_type) != nullptr) continue;
    const ThingType* t = m.find_thing_type(mc.thing_type);
    if (t != nullptr) out.thing_types.push_back(*t);
  }

  auto rename = [&machine_rename](StageRef ref) {
    auto it = machine_rename.find(ref.machine);
    if (it != machine_rename.end()) ref.machine = it->second;
    return ref;
  };

  for (std::size_t i = 0; i < m.flows.size(); ++i) {
    FlowArc arc = m.flows[i];
    arc.id = "f" + std::to_string(i);
    arc.src = rename(arc.src);
    arc.dst = rename(arc.dst);
    out.flows.push_back(std::move(arc));
  }
  for (std::size_t i = 0; i < m.triggers.size(); ++i) {
    TriggerArc arc = m.triggers[i];
    arc.id = "t" + std::to_string(i);
    arc.src = rename(arc.src);
    arc.dst = rename(arc.dst);
    out.triggers.push_back(std::move(arc));
  }
  return out;
}

bool structurally_equal(const Model& a, const Model& b) {
  return canonical(a) == canonical(b);
}

}  // namespace fm
