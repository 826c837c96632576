#pragma once

#include <stdexcept>
#include <string>

namespace smoothcop {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad user input in the data itself (ties, NaN, malformed CSV rows).
struct DataError : Error {
  using Error::Error;
};
struct TieError : DataError {
  using DataError::DataError;
};

struct WindowError : Error {
  using Error::Error;
};
struct DomainError : Error {
  using Error::Error;
};
struct RangeError : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};
struct BandwidthError : Error {
  using Error::Error;
};
struct ToleranceError : Error {
  using Error::Error;
};
struct UnsupportedFamilyError : Error {
  using Error::Error;
};
struct OptimFailure : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};

}  // namespace smoothcop
