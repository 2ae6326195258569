#pragma once

#include <stdexcept>
#include <string>

namespace isingfin {

/// Base class for every domain error raised by the library. The CLI maps
/// anything derived from this to exit code 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text or a missing mapped column.
class FormatError : public Error {
public:
    using Error::Error;
};

/// Input parsed but contained no usable rows.
class EmptyInputError : public Error {
public:
    using Error::Error;
};

/// Price series share no common date.
class AlignmentError : public Error {
public:
    using Error::Error;
};

class InsufficientSampleError : public Error {
public:
    using Error::Error;
};

/// A column has zero variance, so a correlation is undefined.
class DegenerateColumnError : public Error {
public:
    DegenerateColumnError(const std::string& ticker, const std::string& what)
        : Error(what), ticker_(ticker) {}
    const std::string& ticker() const noexcept { return ticker_; }

private:
    std::string ticker_;
};

/// Enumeration requested beyond the supported spin count.
class SizeLimitError : public Error {
public:
    using Error::Error;
};

/// A target moment sits on the boundary |q_i| = 1, where the conjugate
/// field diverges.
class BoundaryError : public Error {
public:
    using Error::Error;
};

class SingularMatrixError : public Error {
public:
    using Error::Error;
};

/// Iteration produced non-finite values or unbounded parameters.
class DivergenceError : public Error {
public:
    using Error::Error;
};

/// Multi-information is too small for the I2/IN ratio to be defined.
class DegenerateRatioError : public Error {
public:
    using Error::Error;
};

/// Generic violated precondition (dimension mismatch, invalid range, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Unknown method tag or inconsistent configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A reliability warning escalated to an error by a strict flag.
class ReliabilityError : public Error {
public:
    using Error::Error;
};

}  // namespace isingfin
