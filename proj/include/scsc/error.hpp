#pragma once

#include <stdexcept>
#include <string>

namespace scsc {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Shape or extent mismatch between operands.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration value (even kernel size, nonpositive ratio, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A documented precondition was violated by the caller.
class ContractError : public Error {
public:
    using Error::Error;
};

/// Numerical failure: non-finite values, divergence, degenerate operators.
class NumericError : public Error {
public:
    using Error::Error;
};

/// File or stream I/O failure, including malformed containers.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace scsc
