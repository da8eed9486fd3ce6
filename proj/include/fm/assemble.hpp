#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "fm/error.hpp"
#include "fm/model.hpp"

namespace fm {

struct AddSphere {
  std::string id;
  std::string name;  // defaults to id when empty
  SphereKind kind = SphereKind::Abstract;
  std::optional<std::string> parent;
};

/// Registers the thing type on first use. An empty id defaults to
/// "<sphere>.<thing_type>".
struct AddMachine {
  std::string id;
  std::string sphere;
  std::string thing_type;
  std::set<Stage> stages;
};

/// Empty ids are numbered f0, f1, ... in declaration order.
struct AddFlow {
  std::string id;
  StageRef src;
  StageRef dst;
};

/// Empty ids are numbered t0, t1, ... in declaration order.
struct AddTrigger {
  std::string id;
  StageRef src;
  StageRef dst;
  std::optional<Guard> guard;
};

using Directive = std::variant<AddSphere, AddMachine, AddFlow, AddTrigger>;

class AssembleError : public Error {
 public:
  AssembleError(std::size_t directive_index, const std::string& what)
      : Error("directive " + std::to_string(directive_index) + ": " + what),
        index_(directive_index) {}

  std::size_t directive_index() const { return index_; }

 private:
  std::size_t index_;
};

/// Applies the directives in order and returns the unvalidated model.
/// Forward references are fine; duplicate ids and references to undeclared
/// spheres/machines throw AssembleError carrying the offending index.
Model assemble(const std::vector<Directive>& directives);

}  // namespace fm
