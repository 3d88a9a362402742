#pragma once

#include <stdexcept>
#include <string>

namespace ihnn {

/// Bad inputs: shape mismatches, out-of-range ids, malformed files, invalid config.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failures: non-convergent solves, violated contraction preconditions.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ihnn
