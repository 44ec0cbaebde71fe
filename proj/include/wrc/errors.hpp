#pragma once

#include <stdexcept>
#include <string>

namespace wrc {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Shape or size mismatch between operands.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// An invariant of a domain type was violated (NaN payload, negative weight, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Malformed file contents (bad magic, unknown version, ...).
class FormatError : public Error {
public:
    using Error::Error;
};

/// Underlying read/write failure or truncated stream.
class IoError : public Error {
public:
    using Error::Error;
};

/// A numerical consistency check failed (imaginary residue, non-convergence).
class NumericalError : public Error {
public:
    using Error::Error;
};

/// The normal-equations matrix is not SPD.
class SingularityError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// A size guard was exceeded (dense path capped at N_h <= 4096).
class CapacityError : public Error {
public:
    using Error::Error;
};

/// A call-site precondition was violated (lambda <= 0, s != 1, ...).
class ContractError : public Error {
public:
    using Error::Error;
};

}  // namespace wrc
