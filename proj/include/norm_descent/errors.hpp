#pragma once

#include <stdexcept>
#include <string>

namespace norm_descent {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or out-of-contract input (bad dimensions, invalid configs, parse failures).
class InputError : public Error {
public:
    using Error::Error;
};

/// The Jacobi sweep cap was hit before the off-diagonal mass converged.
class EigenError : public Error {
public:
    EigenError(const std::string& what, double residual)
        : Error(what), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// A quantity is mathematically undefined for the given input (e.g. density of the zero vector).
class UndefinedError : public Error {
public:
    using Error::Error;
};

} // namespace norm_descent
