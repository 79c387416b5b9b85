#pragma once

#include <stdexcept>
#include <string>

namespace pdiss {

// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed inputs: dimension mismatches, unknown labels, violated preconditions.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Integrator drift, non-finite values, degenerate null spaces.
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace pdiss
