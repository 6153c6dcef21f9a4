#pragma once
#include <stdexcept>
#include <string>

namespace techmap {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad column mappings or malformed schema files.
struct SchemaError : Error {
    using Error::Error;
};

// Data that violates corpus or aggregate invariants.
struct ValidationError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

// Iterative numerics that failed to converge.
struct NumericalError : Error {
    NumericalError(const std::string& what, double residual_arg)
        : Error(what), residual(residual_arg) {}
    double residual = 0.0;
};

}  // namespace techmap
