#pragma once

#include <stdexcept>
#include <string>

namespace polariton {

// Bad input: out-of-range physical values, malformed files, unknown keys.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// The numerics could not produce an answer (no bracket, singular matrix, ...).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace polariton
