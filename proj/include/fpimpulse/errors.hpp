#pragma once

#include <stdexcept>
#include <string>

namespace fpimpulse {

// Error taxonomy. The CLI maps these onto exit categories:
//   ConfigError -> 1, StabilityError -> 2, ConvergenceError -> 3, IoError -> 4.

// Invalid parameters, configuration files, or domain-invariant violations.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Control values outside the admissible range [0, U].
class PolicyError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

// CFL violations and other numerical-stability failures.
class StabilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Iterative solver exhausted its budget (only raised where a report cannot
// carry the converged=false flag instead).
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// File-system and parsing I/O failures.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace fpimpulse
