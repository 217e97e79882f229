#pragma once

#include <stdexcept>
#include <string>

namespace qsr {

// Base class for every failure the library can signal. Numeric context
// (residuals, condition estimates) rides along on the subclasses that have
// it, so callers can report precisely without re-deriving anything.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what_arg) : std::runtime_error(what_arg) {}
};

// A scalar or option value is out of range (non-positive epsilon, empty
// sample list, negative coupling rate, ...).
class InvalidParameter : public Error {
public:
    using Error::Error;
};

// Matrix shapes are mutually inconsistent.
class DimensionMismatch : public Error {
public:
    using Error::Error;
};

// A matrix fails a structural invariant (conjugate-block symmetry,
// Hermiticity, unitarity, block-diagonal scattering form, ...).
class StructureViolation : public Error {
public:
    StructureViolation(const std::string& what_arg, double residual)
        : Error(what_arg), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

// Canonical-parameter extraction found a system that is not physically
// realizable: the recovered Hamiltonian matrix is not Hermitian.
class NotRealizable : public Error {
public:
    NotRealizable(const std::string& what_arg, double residual)
        : Error(what_arg), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

// A linear solve hit a numerically singular matrix (resolvent at or near a
// pole, ill-conditioned coefficient matrix, ...).
class SingularMatrix : public Error {
public:
    using Error::Error;
};

// The fast-dynamics block is singular or numerically near-singular, so the
// slow/fast limit does not exist.
class SingularFastDynamics : public Error {
public:
    SingularFastDynamics(const std::string& what_arg, double rcond)
        : Error(what_arg), rcond_(rcond) {}
    double rcond() const noexcept { return rcond_; }

private:
    double rcond_;
};

// Two independent computations of the same quantity disagree beyond
// tolerance. Signals a bug in this library, not bad user input.
class InternalInconsistency : public Error {
public:
    using Error::Error;
};

// A document could not be parsed or has the wrong top-level shape.
class MalformedInput : public Error {
public:
    using Error::Error;
};

// A file could not be read or written.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace qsr
