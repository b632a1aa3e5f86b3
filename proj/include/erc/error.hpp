#pragma once

#include <stdexcept>
#include <string>

namespace erc {

// Failure taxonomy. The C API and the CLI map these onto process exit
// codes: ConfigError=2, DataError=3, NumericError (and subclasses)=4,
// anything else=1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shape or index contract violated by a caller.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Invalid hyperparameter or option value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed dataset, checkpoint, or other input file.
class DataError : public Error {
 public:
  using Error::Error;
};

// Non-finite value produced during forward or backward.
class NumericError : public Error {
 public:
  using Error::Error;
};

// A reduction over an empty set (fully masked softmax row, zero-degree
// node, empty batch).
class DegenerateError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace erc
