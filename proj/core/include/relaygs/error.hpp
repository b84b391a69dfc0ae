#pragma once

#include <stdexcept>
#include <string>

namespace relaygs {

// User-facing configuration / argument problems. The CLI turns these into a
// clean error message and a non-zero exit code.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed files (checkpoints, datasets, PLY).
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

// Degenerate rotation input (zero-norm quaternion).
class InvalidRotationError : public std::runtime_error {
public:
    explicit InvalidRotationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Broken internal invariant; indicates a bug, not a user error.
class InternalError : public std::logic_error {
public:
    explicit InternalError(const std::string& msg) : std::logic_error(msg) {}
};

}  // namespace relaygs
