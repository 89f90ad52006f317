#ifndef SCWD_ERRORS_HPP
#define SCWD_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace scwd {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad user-supplied parameter or coordinate (CLI exit code 2).
struct InvalidArgumentError : Error {
    using Error::Error;
};

// Two objects built on incompatible grids were combined.
struct GridMismatchError : Error {
    using Error::Error;
};

// Malformed, truncated, or wrong-type input file (CLI exit code 3).
struct DataFormatError : Error {
    using Error::Error;
};

// A cache file exists but was produced with different parameters.
struct CacheMismatchError : DataFormatError {
    using DataFormatError::DataFormatError;
};

// Degenerate numerical situation: empty kernel, empty sample, all-missing
// map (CLI exit code 4).
struct NumericError : Error {
    using Error::Error;
};

}  // namespace scwd

#endif
