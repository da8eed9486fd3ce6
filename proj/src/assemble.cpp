#include "fm/assemble.hpp"

#include <set>

namespace fm {

namespace {

struct Visitor {
  Model model;
  std::set<std::string> sphere_ids;
  std::set<std::string> machine_ids;
  std::set<std::string> flow_ids;
  std::set<std::string> trigger_ids;
  std::size_t index = 0;

  void operator()(const AddSphere& d) {
    Sphere s;
    s.id = d.id;
    s.name = d.name.empty() ? d.id : d.name;
    s.kind = d.kind;
    s.parent = d.parent;
    if (!sphere_ids.insert(s.id).second) {
      throw AssembleError(index, "duplicate sphere id '" + s.id + "'");
    }
    model.spheres.push_back(std::move(s));
  }

  void operator()(const AddMachine& d) {
    Machine m;
    m.sphere = d.sphere;
    m.thing_type = d.thing_type;
    m.id = d.id.empty() ? d.sphere + "." + d.thing_type : d.id;
    m.stages = d.stages;
    if (!machine_ids.insert(m.id).second) {
      throw AssembleError(index, "duplicate machine id '" + m.id + "'");
    }
    if (model.find_thing_type(d.thing_type) == nullptr) {
      model.thing_types.push_back(ThingType{d.thing_type, d.thing_type});
    }
    model.machines.push_back(std::move(m));
  }

  void operator()(const AddFlow& d) {
    FlowArc arc;
    arc.id = d.id.empty() ? "f" + std::to_string(model.flows.size()) : d.id;
    arc.src = d.src;
    arc.dst = d.dst;
    if (!flow_ids.insert(arc.id).second) {
      throw AssembleError(index, "duplicate flow id '" + arc.id + "'");
    }
    model.flows.push_back(std::move(arc));
  }

  void operator()(const AddTrigger& d) {
    TriggerArc arc;
    arc.id = d.id.empty() ? "t" + std::to_string(model.triggers.size()) : d.id;
    arc.src = d.src;
    arc.dst = d.dst;
    arc.guard = d.guard;
    if (!trigger_ids.insert(arc.id).second) {
      throw AssembleError(index, "duplicate trigger id '" + arc.id + "'");
    }
    model.triggers.push_back(std::move(arc));
  }
};

}  // namespace

Model assemble(const std::vector<Directive>& directives) {
  Visitor v;
  for (std::size_t i = 0; i < directives.size(); ++i) {
    v.index = i;
    std::visit(v, directives[i]);
  }

  // Second pass: forward references are legal, so resolution happens after
  // everything is declared. The reported index is the referencing directive.
  for (std::size_t i = 0; i < directives.size(); ++i) {
    const Directive& d = directives[i];
    if (const auto* s = std::get_if<AddSphere>(&d)) {
      if (s->parent.has_value() && v.model.find_sphere(*s->parent) == nullptr) {
        throw AssembleError(i, "dangling parent sphere '" + *s->parent + "'");
      }
    } else if (const auto* m = std::get_if<AddMachine>(&d)) {
      if (v.model.find_sphere(m->sphere) == nullptr) {
        throw AssembleError(i, "dangling sphere reference '" + m->sphere + "'");
      }
    } else if (const auto* f = std::get_if<AddFlow>(&d)) {
      for (const StageRef* ref : {&f->src, &f->dst}) {
        if (v.model.find_machine(ref->machine) == nullptr) {
          throw AssembleError(i, "dangling machine reference '" + ref->machine + "'");
        }
      }
    } else if (const auto* t = std::get_if<AddTrigger>(&d)) {
      for (const StageRef* ref : {&t->src, &t->dst}) {
        if (v.model.find_machine(ref->machine) == nullptr) {
          throw AssembleError(i, "dangling machine reference '" + ref->machine + "'");
        }
      }
    }
  }
  return std::move(v.model);
}

}  // namespace fm
