#pragma once

#include <stdexcept>
#include <string>

namespace gelfand {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Profile parameters outside their admissible range.
class InvalidProfile : public Error {
public:
    using Error::Error;
};

/// Adaptive step size collapsed; signals a pathological profile or parameter.
class StepUnderflow : public Error {
public:
    using Error::Error;
};

/// Integration range too short for the requested asymptotic statement.
class InsufficientRange : public Error {
public:
    using Error::Error;
};

/// Operation not defined for this input (e.g. rate in the bounded case).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Eigenvalue shooting bracket does not straddle the target.
class BracketFailure : public Error {
public:
    using Error::Error;
};

/// Threshold bisection bracket is not stable/unstable.
class BracketError : public Error {
public:
    using Error::Error;
};

/// A stable verdict was observed above an unstable one.
class NonMonotoneWitness : public Error {
public:
    using Error::Error;
};

/// Test function support exceeds the integrated range.
class SupportError : public Error {
public:
    using Error::Error;
};

/// Solutions compared over incompatible ranges or models.
class RangeMismatch : public Error {
public:
    using Error::Error;
};

/// Transform needs N >= 3.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Phase-plane trajectory left the regular-solution region.
class Divergence : public Error {
public:
    using Error::Error;
};

/// Malformed experiment configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace gelfand
