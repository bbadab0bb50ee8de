#pragma once

#include <stdexcept>
#include <string>

namespace pdqrng {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A configuration or input value violates a documented invariant.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Input data failed validation (out-of-range samples, non-normalized masses, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// An operation was called outside its documented domain.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Statistics that cannot be computed from the given data (e.g. zero variance).
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

/// The rate-equation state became non-finite.
class DivergenceError : public Error {
public:
    DivergenceError(double time, const std::string& what);
    double time() const noexcept { return time_; }

private:
    double time_;
};

/// A root-finding problem had no solution inside its bracket.
class NoSolutionError : public Error {
public:
    NoSolutionError(double lower, double upper, const std::string& what);
    double lower() const noexcept { return lower_; }
    double upper() const noexcept { return upper_; }

private:
    double lower_;
    double upper_;
};

/// No candidate parameter set satisfies the conservative envelope constraint.
class InfeasibleFitError : public Error {
public:
    using Error::Error;
};

} // namespace pdqrng
