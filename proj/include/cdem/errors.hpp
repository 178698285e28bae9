#pragma once

#include <stdexcept>
#include <string>

namespace cdem {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed file header or inconsistent declared dimensions.
class FormatError : public Error {
public:
    using Error::Error;
};

/// Input data violating a type invariant (non-finite entries, missing classes, ...).
class DataError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration or argument combination.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Numerical breakdown (indefinite matrix, non-finite objective).
class NumericError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Violated precondition that the calling module is responsible for.
class InternalError : public Error {
public:
    using Error::Error;
};

}  // namespace cdem
