#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace chainrisk {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument is outside the domain of the operation (negative time,
/// non-finite input, probability outside [0,1], n < 2, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A law that is not closed under convolution was used as a hacking-time law.
class UnsupportedFamilyError : public Error {
public:
    using Error::Error;
};

/// A numerical routine (quadrature, grid solver) could not meet its tolerance.
class NumericalError : public Error {
public:
    NumericalError(const std::string& what, double estimate)
        : Error(what), estimate_(estimate) {}
    double estimate() const noexcept { return estimate_; }

private:
    double estimate_;
};

/// A truncated series ran out of terms before reaching its tolerance.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, std::size_t terms_used)
        : Error(what), terms_used_(terms_used) {}
    std::size_t terms_used() const noexcept { return terms_used_; }

private:
    std::size_t terms_used_;
};

/// Conditioning on an event of probability zero (p_mk = 0 or p_mk = 1).
class ConditioningError : public Error {
public:
    using Error::Error;
};

/// A simulated history exceeded the cycle cap without being hacked.
class RunawayError : public Error {
public:
    using Error::Error;
};

/// Malformed configuration document. `line()` is 1-based, 0 when the error
/// is not tied to a line (e.g. a missing section).
class ParseError : public Error {
public:
    ParseError(const std::string& what, int line)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

}  // namespace chainrisk
