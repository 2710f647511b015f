#ifndef IKAM_ERRORS_HPP
#define IKAM_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ikam {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Expression text could not be parsed; `position` is a byte offset into the source.
struct ParseError : Error {
    ParseError(const std::string& msg, std::size_t pos)
        : Error(msg + " (at offset " + std::to_string(pos) + ")"), position(pos) {}
    std::size_t position;
};

// Expression evaluation hit a math domain problem (sqrt of a negative,
// division by zero, non-integer power of a negative base, overflow).
struct EvalError : Error {
    using Error::Error;
};

// Config document is structurally wrong (missing field, bad type).
struct ConfigError : Error {
    using Error::Error;
};

// Config parsed but violates a model invariant (impulse ordering,
// coefficient count, non-periodic coefficient).
struct ValidationError : Error {
    using Error::Error;
};

// Input outside the mathematical domain of an operation
// (origin for the angle map, |u| > 1 for the reference-orbit inverse, ...).
struct DomainError : Error {
    using Error::Error;
};

// Numerical integration failed. Blow-up between impulses is a legitimate
// dynamical outcome and is reported through this type, never masked.
struct FlowError : Error {
    enum class Kind { step_underflow, non_finite, blow_up };
    FlowError(Kind k, double time, const std::string& msg) : Error(msg), kind(k), t(time) {}
    Kind kind;
    double t;
};

} // namespace ikam

#endif
