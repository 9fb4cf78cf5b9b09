#pragma once

#include <stdexcept>
#include <string>

namespace kaclab {

/// Bad input to a constructor or operation (names the offending field).
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Non-finite intermediate values.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Iterative method or quadrature failed to reach its tolerance.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace kaclab
