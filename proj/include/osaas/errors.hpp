#pragma once

#include <stdexcept>
#include <string>

namespace osaas {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed domain objects: channels outside windows, out-of-range powers, bad grids.
struct ValidationError : Error {
  using Error::Error;
};

// Numerical trouble inside the line-system surrogate (non-finite powers etc.).
struct SimulationError : Error {
  using Error::Error;
};

// File/serialization problems and format-version mismatches.
struct IoError : Error {
  using Error::Error;
};

// Bad run configuration (unknown keys, missing paths, unreachable calibration targets).
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace osaas
