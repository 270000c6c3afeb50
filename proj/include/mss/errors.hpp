#pragma once

#include <stdexcept>
#include <string>

namespace mss {

/// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Bad user input: malformed curve spec, invalid CLI arguments, bad config.
struct InputError : Error {
    using Error::Error;
};

/// Requested a tangent-dependent quantity at a lightlike parameter.
struct LightlikeTangent : Error {
    using Error::Error;
};

/// Evolute requested where the curvature vanishes.
struct VanishingCurvature : Error {
    using Error::Error;
};

/// The 2x2 osculating-center system is singular (inflection-like point).
struct SingularSystem : Error {
    using Error::Error;
};

/// The two pseudo-normal lines of a parameter pair are parallel.
struct ParallelNormals : Error {
    using Error::Error;
};

/// Classification requested for a lightcone (LC) bitangent circle.
struct LightconeCircle : Error {
    using Error::Error;
};

/// Classification preconditions violated (degenerate magnitudes).
struct NonGeneric : Error {
    using Error::Error;
};

/// Internal numerical failure that is not a user-input problem.
struct NumericError : Error {
    using Error::Error;
};

} // namespace mss
