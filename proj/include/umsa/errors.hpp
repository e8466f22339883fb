#pragma once

#include <stdexcept>
#include <string>

namespace umsa {

// Operand shapes do not conform (wrong rows/cols for an op).
struct ShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An API was called outside its contract (non-scalar backward, n < 2, ...).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid configuration value or combination.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Input data violates a documented invariant (GRS out of range, ...).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A file does not match its declared on-disk layout.
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace umsa
