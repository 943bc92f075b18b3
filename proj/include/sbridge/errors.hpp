#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sbridge {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-finite values, empty grids, malformed arguments.
class NumericDomainError : public Error {
public:
    using Error::Error;
};

class NormalizationError : public Error {
public:
    using Error::Error;
};

/// Raised when a two-time object is queried with s >= t.
class OrderingError : public Error {
public:
    using Error::Error;
};

/// A discretized kernel produced entries below the negativity floor.
class PositivityError : public Error {
public:
    using Error::Error;
};

class NonConvergenceError : public Error {
public:
    NonConvergenceError(const std::string& what, double last_residual, std::size_t iterations)
        : Error(what), last_residual_(last_residual), iterations_(iterations) {}

    double last_residual() const noexcept { return last_residual_; }
    std::size_t iterations() const noexcept { return iterations_; }

private:
    double last_residual_;
    std::size_t iterations_;
};

/// Kernel and boundary data admit no positive factor pair on the grid.
class IncompatibilityError : public Error {
public:
    using Error::Error;
};

class PropagationConsistencyError : public Error {
public:
    using Error::Error;
};

class BoundaryLeakError : public Error {
public:
    BoundaryLeakError(const std::string& what, double live_fraction)
        : Error(what), live_fraction_(live_fraction) {}

    double live_fraction() const noexcept { return live_fraction_; }

private:
    double live_fraction_;
};

/// Scenario configuration problems; line is 0 when not tied to a line.
class ConfigError : public Error {
public:
    ConfigError(const std::string& what, std::size_t line = 0) : Error(what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class MissingFileError : public Error {
public:
    using Error::Error;
};

/// Input data violating a documented invariant (e.g. unnormalized density).
class ValidationError : public Error {
public:
    using Error::Error;
};

} // namespace sbridge
