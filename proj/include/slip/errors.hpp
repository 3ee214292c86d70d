#pragma once

#include <stdexcept>
#include <string>

namespace slip {

/// Inputs that do not fit together (mismatched grids, wrong vector lengths,
/// cell values outside the label set).
class StructuralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Invalid solver or experiment configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A size guard refused to run (enumeration too large).
class GuardError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Filesystem failures, always carrying the offending path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace slip
