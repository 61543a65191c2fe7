#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace linefib {

/// Base class for all errors thrown by this library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed expression text. `offset` is the byte position of the problem.
struct ParseError : Error {
    std::size_t offset;

    ParseError(std::size_t off, const std::string& msg)
        : Error("parse error at byte " + std::to_string(off) + ": " + msg), offset(off) {}
};

/// Evaluation left the domain of a subexpression (log of a non-positive
/// value, division by zero, normalization of a zero vector, ...).
struct DomainError : Error {
    explicit DomainError(const std::string& msg) : Error(msg) {}
};

/// A numerical procedure could not complete (rank precondition violated,
/// kernel ambiguity, winding under-sampled after retries, ...).
struct NumericalError : Error {
    explicit NumericalError(const std::string& msg) : Error(msg) {}
};

/// Failure while recovering the angle profile of a rank-1 field.
/// `z_near` locates the offending height along the frame's third axis.
struct ThetaRecoveryError : NumericalError {
    enum class Reason { OutOfPlane, PrimeVanishes, Unwrap };

    Reason reason;
    double z_near;

    ThetaRecoveryError(Reason r, double z, const std::string& msg)
        : NumericalError(msg), reason(r), z_near(z) {}
};

}  // namespace linefib
