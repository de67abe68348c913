#ifndef CDARELAY_ERROR_HPP
#define CDARELAY_ERROR_HPP

#include <stdexcept>
#include <string>

namespace cdarelay {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad parameters or inputs that violate a documented precondition.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// The requested (m, T, base) combination has no catalog entry.
class UnsupportedTower : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// An element was used outside the subfield an operation is defined on.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Operands belong to different towers.
class TowerMismatch : public Error {
public:
    using Error::Error;
};

/// Refusal to start work that exceeds a configured size ceiling.
class ResourceGuardError : public Error {
public:
    using Error::Error;
};

/// Slope fit was asked for with too few nonzero event counts.
class InsufficientEvents : public Error {
public:
    using Error::Error;
};

} // namespace cdarelay

#endif // CDARELAY_ERROR_HPP
