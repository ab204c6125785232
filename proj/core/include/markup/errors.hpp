#pragma once

#include <stdexcept>
#include <string>

namespace markup {

/// Root of every exception thrown by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument or parameter was violated.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Numerical failures: the inputs were valid but a computation did not
/// produce a trustworthy number.
class NumericalError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class QuadratureError : public NumericalError {
public:
    QuadratureError(const std::string& what, double achieved_error)
        : NumericalError(what), achieved_error_(achieved_error) {}

    [[nodiscard]] double achieved_error() const noexcept { return achieved_error_; }

private:
    double achieved_error_;
};

/// Efficient surplus is infinite (tail condition fails) or sits on the
/// finiteness boundary without an explicit truncation.
class InfiniteSurplusError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// S >= Pi + U failed by more than the quadrature slack.
class FeasibilityError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace markup
