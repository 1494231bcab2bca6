#pragma once

#include "json.hpp"

#include <string>
#include <vector>

namespace liesym::cli {

/// Checks doc against the subset of JSON Schema used by the report schema:
/// type, enum, required, properties, additionalProperties, items, minimum, minLength.
std::vector<std::string> validate(const nlohmann::json& schema, const nlohmann::json& doc, const std::string& path = "$");

} // namespace liesym::cli
