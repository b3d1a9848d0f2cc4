#pragma once

#include <json.hpp>

#include "cxorder/measure.hpp"

namespace cxorder {

/// Exact scalars serialize as "num/den" strings (or "n"); floats as JSON numbers.
nlohmann::json scalar_to_json(const Scalar& s);

/// Accepts strings (parsed by Scalar::parse) and numbers; integers stay exact.
Scalar scalar_from_json(const nlohmann::json& j);

/// {"regime": "exact"|"float", "atoms": [{"x": .., "w": ..}], "mass_defect": ..}
nlohmann::json measure_to_json(const FiniteMeasure& m);

/// Inverse of measure_to_json. The regime tag wins: a "float" document
/// coerces every value, an "exact" one rejects non-exact values.
FiniteMeasure measure_from_json(const nlohmann::json& j);

}  // namespace cxorder
