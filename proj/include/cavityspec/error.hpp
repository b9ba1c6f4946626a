// error.hpp - exception types shared by every cavityspec module

#pragma once

#include <stdexcept>
#include <string>

namespace cavityspec {

// Invalid physical parameters or configuration. Maps to CLI exit code 2.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// An argument outside the mathematical domain of an operation (e.g. W < 0).
class DomainError : public ValidationError {
public:
    explicit DomainError(const std::string& what) : ValidationError(what) {}
};

// det M(0) <= 0: the requested point lies at or beyond the Dicke threshold.
class SupercriticalError : public DomainError {
public:
    explicit SupercriticalError(const std::string& what) : DomainError(what) {}
};

// Quadrature, root finding or series truncation did not converge. Exit code 3.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cavityspec
