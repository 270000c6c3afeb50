#pragma once

#include <string>

#include "json.hpp"

#include "mss/curve.hpp"

namespace mss {

/// Parse a curve (with optional deformation family) from JSON. The format is
/// strict: unknown keys and non-finite numbers are rejected with InputError.
CurveFamily parse_curve(const nlohmann::json& j);

/// Load and parse a curve file; throws InputError on I/O or parse failure.
CurveFamily load_curve_file(const std::string& path);

/// Serialize a curve family back to JSON in the same shape parse_curve
/// accepts. parse_curve(curve_to_json(c)) reproduces c exactly.
nlohmann::ordered_json curve_to_json(const CurveFamily& curve);

} // namespace mss
