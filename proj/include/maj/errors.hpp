#pragma once

#include <stdexcept>
#include <string>

namespace maj {

// Bad or inconsistent input data; CLI maps this to exit code 2.
struct InputError : std::invalid_argument {
  explicit InputError(const std::string& msg) : std::invalid_argument(msg) {}
};

// A computation could not meet its accuracy contract; CLI exit code 3.
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// Negative decisions raised by constructive operations; CLI exit code 1.
struct NotMajorized : std::runtime_error {
  explicit NotMajorized(const std::string& msg) : std::runtime_error(msg) {}
};

struct NotSubmajorized : std::runtime_error {
  explicit NotSubmajorized(const std::string& msg) : std::runtime_error(msg) {}
};

struct NotConvertible : std::runtime_error {
  explicit NotConvertible(const std::string& msg) : std::runtime_error(msg) {}
};

struct NotExtendable : std::runtime_error {
  explicit NotExtendable(const std::string& msg) : std::runtime_error(msg) {}
};

// Birkhoff decomposition left more mass unexplained than the tolerance allows.
struct BirkhoffResidual : NumericError {
  BirkhoffResidual(const std::string& msg, double residual)
      : NumericError(msg), residual(residual) {}
  double residual;
};

}  // namespace maj
