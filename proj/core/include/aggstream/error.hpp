#pragma once

#include <stdexcept>
#include <string>

namespace aggstream {

/// Invalid configuration (bad flag combination, bad parameter value).
/// Maps to process exit code 1.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Unreachable or unreadable input/output resource. Maps to exit code 2.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// Corrupt or unsupported serialized payload.
struct DecodeError : std::runtime_error {
    explicit DecodeError(const std::string& what) : std::runtime_error(what) {}
};

/// A caller broke an operation precondition (e.g. training on an unlabeled
/// instance, merging replicas forked from a stale model version).
/// Maps to exit code 3.
struct ContractViolation : std::logic_error {
    explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

} // namespace aggstream
