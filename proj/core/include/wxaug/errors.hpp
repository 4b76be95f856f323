#pragma once

#include <stdexcept>
#include <string>

namespace wxaug {

// Invalid parameters or configuration detected before any work starts.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed or inconsistent data: bad PNG layout, manifest syntax, class ids
// outside the dataset's range, shape mismatches.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File system failures (missing files, unwritable directories).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite loss or gradients during training.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wxaug
