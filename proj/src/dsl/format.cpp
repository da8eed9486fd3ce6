#include "fm/dsl/format.hpp"

#include <map>
#include <string>
#include <vector>

namespace fm::dsl {

namespace {

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

/// sphere.thing.Stage for a machine the model knows; falls back to the raw
/// machine id for dangling references.
std::string ref_text(const Model& m, const StageRef& ref) {
  const Machine* mc = m.find_machine(ref.machine);
  std::string head = mc != nullptr ? mc->sphere + "." + mc->thing_type
                                   : ref.machine;
  return head + "." + std::string(stage_name(ref.stage));
}

void emit_sphere(const Model& m,
                 const std::map<std::string, std::vector<const Sphere*>>& children,
                 const Sphere& s, int depth, std::string& out) {
  std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  out += pad + "sphere " + s.id + " [kind=" +
         std::string(sphere_kind_name(s.kind));
  if (s.name != s.id) out += ", name=" + quoted(s.name);
  out += "] {\n";
  for (const auto& mc : m.machines) {
    if (mc.sphere != s.id) continue;
    out += pad + "  machine " + mc.thing_type + " {\n";
    if (!mc.stages.empty()) {
      out += pad + "    stages: ";
      bool first = true;
      for (Stage st : kAllStages) {
        if (mc.stages.count(st) == 0) continue;
        if (!first) out += ", ";
        first = false;
        out += std::string(stage_name(st));
      }
      out += ";\n";
    }
    out += pad + "  }\n";
  }
  auto kids = children.find(s.id);
  if (kids != children.end()) {
    for (const Sphere* child : kids->second)
      emit_sphere(m, children, *child, depth + 1, out);
  }
  out += pad + "}\n";
}

}  // namespace

std::string format_model(const Model& m) {
  std::map<std::string, std::vector<const Sphere*>> children;
  std::vector<const Sphere*> roots;
  for (const auto& s : m.spheres) {
    if (s.parent && m.find_sphere(*s.parent) != nullptr) {
      children[*s.parent].push_back(&s);
    } else {
      roots.push_back(&s);
    }
  }

  std::string out;
  for (const Sphere* root : roots) emit_sphere(m, children, *root, 0, out);

  if (!m.flows.empty() || !m.triggers.empty()) {
    if (!out.empty()) out += "\n";
    for (const auto& arc : m.flows) {
      out += "flow " + ref_text(m, arc.src) + " -> " + ref_text(m, arc.dst) + ";\n";
    }
    for (const auto& arc : m.triggers) {
      out += "trigger " + ref_text(m, arc.src) + " -> " + ref_text(m, arc.dst);
      if (arc.guard) out += " when " + arc.guard->text();
      out += ";\n";
    }
  }
  return out;
}

}  // namespace fm::dsl
