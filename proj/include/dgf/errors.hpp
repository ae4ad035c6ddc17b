#pragma once

#include <stdexcept>
#include <string>

namespace dgf {

/// Root of all errors thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid argument or out-of-domain value.
struct DomainError : Error {
    using Error::Error;
};

/// Controller or filter synthesis could not be completed.
struct DesignError : Error {
    using Error::Error;
};

/// Model fitting failed (degenerate data, unstable or improper result).
struct FitError : Error {
    using Error::Error;
};

/// ABCD propagation hit a degenerate configuration.
struct SingularityError : Error {
    using Error::Error;
};

/// Malformed configuration file or unknown key.
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace dgf
