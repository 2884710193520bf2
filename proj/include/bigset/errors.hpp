#pragma once

#include <stdexcept>
#include <string>

namespace bigset {

// Base of every library error. Precondition violations on arguments are
// reported with std::invalid_argument instead.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Unreadable files, malformed containers, shape mismatches between inputs.
class DataError : public Error {
public:
    using Error::Error;
};

// Singular matrices, non-finite values, degenerate distributions.
class NumericError : public Error {
public:
    using Error::Error;
};

// The unimodal corner search could not find a separation point.
class ThresholdError : public NumericError {
public:
    using NumericError::NumericError;
};

}  // namespace bigset
