#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace dfpv {

// Bad shapes, empty inputs, malformed configs. The CLI maps these to exit 1.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Base for numerical failures. The CLI maps these to exit 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularMatrixError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DegenerateBandwidthError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NonfiniteLossError : public NumericalError {
 public:
  NonfiniteLossError(const std::string& what, long iteration = -1,
                     std::vector<double> loss_trace = {})
      : NumericalError(what), iteration_(iteration), loss_trace_(std::move(loss_trace)) {}

  long iteration() const noexcept { return iteration_; }
  const std::vector<double>& loss_trace() const noexcept { return loss_trace_; }

 private:
  long iteration_;
  std::vector<double> loss_trace_;
};

}  // namespace dfpv
