#pragma once

#include <stdexcept>
#include <string>

namespace xbarfilt {

/// Base class for all library failures.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A value violates a documented precondition or type invariant.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Malformed input document (JSON design, CSV table, Touchstone file).
class SchemaError : public Error {
public:
    using Error::Error;
};

/// A numeric procedure could not produce a result (no crossing, no peak,
/// unreachable target, infeasible plan).
class SolverError : public Error {
public:
    using Error::Error;
};

/// The passband edge walk ran off the end of the grid.
class UnboundedBandError : public SolverError {
public:
    using SolverError::SolverError;
};

inline void require(bool condition, const std::string& message) {
    if (!condition) {
        throw InvalidArgument(message);
    }
}

}  // namespace xbarfilt
