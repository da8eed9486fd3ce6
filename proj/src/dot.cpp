#include "fm/dot.hpp"

#include <map>
#include <sstream>
#include <vector>

#include "fm/error.hpp"
#include "fm/validate.hpp"

namespace fm {

namespace {

std::string escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

std::string node_id(const Machine& m, Stage s) {
  return m.id + "." + std::string(stage_name(s));
}

struct DotWriter {
  const Model& model;
  std::ostringstream out;
  int next_cluster = 0;

  void emit_sphere(const Sphere& sphere, int depth) {
    std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
    out << pad << "subgraph cluster_" << next_cluster++ << " {\n";
    out << pad << "  label=\"" << escape(sphere.name) << "\";\n";
    for (const auto& mc : model.machines) {
      if (mc.sphere != sphere.id) continue;
      const ThingType* t = model.find_thing_type(mc.thing_type);
      out << pad << "  subgraph cluster_" << next_cluster++ << " {\n";
      out << pad << "    label=\"" << escape(t != nullptr ? t->name : mc.thing_type)
          << "\";\n";
      for (Stage s : mc.stages) {
        out << pad << "    \"" << escape(node_id(mc, s)) << "\" [label=\"" << stage_name(s)
            << "\"];\n";
      }
      out << pad << "  }\n";
    }
    for (const auto& child : model.spheres) {
      if (child.parent.has_value() && *child.parent == sphere.id) emit_sphere(child, depth + 1);
    }
    out << pad << "}\n";
  }
};

}  // namespace

std::string to_dot(const Model& m) {
  ValidationReport report = validate(m);
  if (!report.ok()) {
    throw ContractError("to_dot: model does not validate (" + report.violations.front().rule +
                        " at " + report.violations.front().location + ")");
  }

  DotWriter w{m, {}, 0};
  w.out << "digraph fm {\n";
  w.out << "  rankdir=LR;\n";
  w.out << "  node [shape=box];\n";
  for (const auto& sphere : m.spheres) {
    if (!sphere.parent.has_value()) w.emit_sphere(sphere, 1);
  }
  for (const auto& arc : m.flows) {
    const Machine* src = m.find_machine(arc.src.machine);
    const Machine* dst = m.find_machine(arc.dst.machine);
    w.out << "  \"" << escape(node_id(*src, arc.src.stage)) << "\" -> \""
          << escape(node_id(*dst, arc.dst.stage)) << "\";\n";
  }
  for (const auto& arc : m.triggers) {
    const Machine* src = m.find_machine(arc.src.machine);
    const Machine* dst = m.find_machine(arc.dst.machine);
    w.out << "  \"" << escape(node_id(*src, arc.src.stage)) << "\" -> \""
          << escape(node_id(*dst, arc.dst.stage)) << "\" [style=dashed";
    if (arc.guard.has_value()) {
      w.out << ", label=\"" << escape(arc.guard->text()) << "\"";
    }
    w.out << "];\n";
  }
  w.out << "}\n";
  return w.out.str();
}

}  // namespace fm
