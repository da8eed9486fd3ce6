#pragma once

#include <string>

#include "fm/model.hpp"

namespace fm::dsl {

/// Canonical model text: spheres depth-first in declaration order, machines
/// nested in their sphere, then flows, then triggers. parse_model(format_model(m))
/// gives a structurally equal model, and formatting is idempotent.
std::string format_model(const Model& m);

}  // namespace fm::dsl
