#pragma once

#include <stdexcept>
#include <string>

namespace elk {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid grid, scheme, or run configuration (e.g. spectral scheme on a non power-of-two grid).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of an operation (R outside the box, t <= 0, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Malformed or truncated ELF3 file.
class FormatError : public Error {
public:
    using Error::Error;
};

/// Input violates a documented precondition; the checker refuses to run.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Time integration produced non-finite values.
class InstabilityError : public Error {
public:
    using Error::Error;
};

}  // namespace elk
