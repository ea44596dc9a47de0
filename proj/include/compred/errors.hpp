#pragma once

#include <stdexcept>
#include <string>

namespace compred {

/// Precondition violations on arguments (bad dt, mass, lengths, degrees...).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A horizon or index that runs past the end of a series.
class OutOfRange : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

class TrialTooShort : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised by the metric reductions when a hierarchy level has no members.
class AggregationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Variance-based statistics with zero spread where a nonzero one is needed.
class DegenerateVariance : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input errors. The CLI maps everything deriving from InputError to exit code 1.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SchemaError : public InputError {
public:
    using InputError::InputError;
};

class LengthMismatch : public InputError {
public:
    using InputError::InputError;
};

class NonMonotoneTime : public InputError {
public:
    using InputError::InputError;
};

class ManifestError : public InputError {
public:
    using InputError::InputError;
};

class ConfigError : public InputError {
public:
    using InputError::InputError;
};

} // namespace compred
