#pragma once

#include <stdexcept>
#include <string>

namespace shiftlab {

// Base for all library errors. Callers that need to distinguish causes catch
// the concrete type; the CLI maps any Error to exit code 2 (operational
// failure), reserving exit code 1 for verdicts that fail with a witness.
struct Error : std::runtime_error {
    explicit Error(const std::string& what_arg) : std::runtime_error(what_arg) {}
};

// An index was requested past the materialized portion of a weight sequence.
struct IndexBeyondMaterialized : Error {
    using Error::Error;
};

// Requested construction depth exceeds the configured memory/export budget.
struct DepthTooLarge : Error {
    using Error::Error;
};

// A verification or profile needs more blocks than were materialized.
struct InsufficientDepth : Error {
    using Error::Error;
};

// An index range violates a scan's precondition (e.g. starts inside the
// balanced prefix that the easy estimate excludes).
struct RangeViolatesPrecondition : Error {
    using Error::Error;
};

// Norm or decay profile of the zero vector was requested.
struct ZeroVector : Error {
    using Error::Error;
};

// A region kind was paired with a system that does not act on it.
struct RegionSystemMismatch : Error {
    using Error::Error;
};

// A rotation scan horizon reached the exact period of the rational angle.
struct HorizonExceedsPeriod : Error {
    using Error::Error;
};

// separation_region needs d(x, Tx) > 0.
struct FixedPointInput : Error {
    using Error::Error;
};

// separation_region is only defined for injective systems.
struct NonInjectiveSystem : Error {
    using Error::Error;
};

// Symbol sequences shorter than the metric's truncation depth.
struct LengthMismatch : Error {
    using Error::Error;
};

// Malformed input file, flag value, or JSON document.
struct ParseError : Error {
    using Error::Error;
};

// Catch-all for violated call preconditions that have no dedicated type.
struct PreconditionViolation : Error {
    using Error::Error;
};

}  // namespace shiftlab
