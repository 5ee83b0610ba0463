#pragma once

#include <stdexcept>
#include <string>

namespace tsvqr {

inline constexpr const char* kVersion = "0.1.0";

/// Raised when a solver invariant is violated at runtime (e.g. the
/// incremental gradient drifts past its debug bound). Precondition
/// violations use std::invalid_argument instead.
class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised for file-format and filesystem failures (CSV, model JSON).
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace tsvqr
