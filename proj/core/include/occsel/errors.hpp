#pragma once

#include <stdexcept>

namespace occsel {

// Bad run configuration or model-space setup. CLI exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data. CLI exit code 2.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical failure (singular Gram block, diverged solve, ...). CLI exit code 3.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace occsel
