#pragma once

#include <stdexcept>

namespace selguide {

struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InvalidScheduleConfig : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct UnknownLabel : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct SeedMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct EmptySet : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DegenerateFit : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InvalidSweep : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Raised for malformed or inconsistent config files; the message names the
/// offending key (or carries the parser's position diagnostic).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace selguide
