#pragma once

#include <stdexcept>
#include <string>

namespace amdcast {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shape or variant mismatch between operands (matrix dims, column sets,
/// window lengths, model variants).
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Bad, insufficient or degenerate input data (parse failures, short series,
/// constant columns, empty datasets, missing overlap).
class DataError : public Error {
public:
    using Error::Error;
};

/// Numeric failure: rank-deficient systems, non-finite payloads.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Filesystem read/write failure.
class IoError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration value or unknown config key.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace amdcast
