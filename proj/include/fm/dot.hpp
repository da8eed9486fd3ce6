#pragma once

#include <string>

#include "fm/model.hpp"

namespace fm {

/// Graphviz rendering: one cluster per sphere (nested like the sphere
/// forest), one sub-cluster per machine, one node per stage; flows solid,
/// triggers dashed with the guard as edge label. Output is byte-stable for
/// equal models. Throws ContractError when the model does not validate.
std::string to_dot(const Model& m);

}  // namespace fm
