#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace symlearn {

// Qubit or site index outside the register.
class IndexError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Malformed arguments: mismatched sizes, non-positive counts, bad labels.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Request exceeds a configured size cap (qubits, matrix dimension).
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite objective values, integrator blow-up and similar failures.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what, std::vector<double> point = {})
      : std::runtime_error(what), point_(std::move(point)) {}

  // Parameter vector at which the failure was detected, if any.
  const std::vector<double>& point() const { return point_; }

 private:
  std::vector<double> point_;
};

}  // namespace symlearn
