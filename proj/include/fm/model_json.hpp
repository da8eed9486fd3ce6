#pragma once

#include <string>

#include "json.hpp"

#include "fm/model.hpp"

namespace fm {

/// Stable field ordering throughout; equal models serialize to equal bytes.
nlohmann::ordered_json model_to_json(const Model& m);

/// Throws fm::Error on malformed input.
Model model_from_json(const nlohmann::ordered_json& j);

std::string model_to_json_text(const Model& m);
Model model_from_json_text(const std::string& text);

}  // namespace fm
