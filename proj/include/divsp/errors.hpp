#pragma once

#include <stdexcept>
#include <string>

namespace divsp {

// Error taxonomy shared by all modules. The CLI maps these onto exit codes
// (config/parse -> 2, integrity -> 3, numerical -> 4).
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A documented precondition was violated by the caller.
struct PreconditionError : Error {
    using Error::Error;
};

// Operation invoked in an invalid state (e.g. step after terminal).
struct UsageError : Error {
    using Error::Error;
};

// Invalid configuration value or unknown identifier; message names the field.
struct ConfigError : Error {
    using Error::Error;
};

// Malformed input text (ASCII levels, CSV, snapshots).
struct ParseError : Error {
    using Error::Error;
};

// Id not found in a container.
struct LookupError : Error {
    using Error::Error;
};

// Non-finite value produced where a finite one is required.
struct NumericalError : Error {
    using Error::Error;
};

// A cached value disagrees with its from-scratch recomputation.
struct IntegrityError : Error {
    using Error::Error;
};

}  // namespace divsp
