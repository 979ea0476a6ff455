#pragma once

#include <stdexcept>
#include <string>

namespace superrad {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed user input (bad vector, negative rate, mismatched sizes).
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// A mathematical quantity is evaluated outside its domain (e.g. r = 0).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Problem too large for the exact engine.
class CapacityError : public Error {
public:
    using Error::Error;
};

/// The Liouvillian has more than one stationary state.
class NonUniqueSteadyState : public Error {
public:
    using Error::Error;
};

class IntegratorFailure : public Error {
public:
    using Error::Error;
};

class SolverFailure : public Error {
public:
    using Error::Error;
};

/// Ratio with a vanishing denominator, e.g. g2 in a dark direction.
class UndefinedResult : public Error {
public:
    using Error::Error;
};

/// A spectral feature extends past the sampled frequency window.
class GridTooNarrow : public Error {
public:
    GridTooNarrow(const std::string& what, double suggested_half_width)
        : Error(what), suggested_half_width_(suggested_half_width) {}

    double suggested_half_width() const noexcept { return suggested_half_width_; }

private:
    double suggested_half_width_;
};

class EmptyMap : public Error {
public:
    using Error::Error;
};

/// Experiment configuration rejected before any computation.
class ValidationError : public Error {
public:
    using Error::Error;
};

} // namespace superrad
