#pragma once

#include <stdexcept>
#include <string>

namespace bmprior {

// Base for every failure caused by the data or the inputs, as opposed to
// programmer error. The CLI maps these to exit code 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or truncated file contents.
class FormatError : public Error {
public:
    using Error::Error;
};

// Violated precondition on an argument (sizes, ranges, shapes).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Singular matrices, out-of-domain special functions, failed iterations.
class NumericalError : public Error {
public:
    using Error::Error;
};

// Log-linear fit impossible: nonpositive data inside the fit window.
class FitDomainError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace bmprior
