#pragma once

#include <stdexcept>
#include <string>

namespace force2vec {

// Error taxonomy mirrored by the CLI exit codes:
// usage=1, io=2, format=3, numerical=4.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UsageError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

// Malformed input files: bad headers, bad tokens, wrong line counts.
struct FormatError : Error {
  using Error::Error;
};

// Indices out of declared bounds, dimension mismatches between inputs.
struct RangeError : Error {
  using Error::Error;
};

// NaN/Inf detected where the contract requires finite values.
struct NumericalError : Error {
  using Error::Error;
};

// Operation not defined for the requested model or mode.
struct UnsupportedError : Error {
  using Error::Error;
};

}  // namespace force2vec
