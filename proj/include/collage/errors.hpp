#pragma once

#include <stdexcept>
#include <string>

namespace collage {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a function (e.g. t outside [0,1]).
class DomainError : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class SingularMatrixError : public Error {
public:
    using Error::Error;
};

class NotSpdError : public Error {
public:
    using Error::Error;
};

class UnsupportedOrderError : public Error {
public:
    using Error::Error;
};

/// The least-squares design matrix of the parameter estimator lost rank.
class RankDeficientError : public Error {
public:
    using Error::Error;
};

/// The perturbation bound ||c|| < 1/rho does not hold.
class ConditionViolatedError : public Error {
public:
    using Error::Error;
};

/// Invalid user configuration (CLI flags, unparsable numbers).
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace collage
