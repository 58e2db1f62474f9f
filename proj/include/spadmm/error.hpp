#pragma once

#include <stdexcept>
#include <string>

namespace spadmm {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Mismatched dimensions or otherwise malformed arguments.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// A set has no feasible point, or an LP has no feasible solution where one is required.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

// An iterative method hit its iteration cap. Carries the last achieved residual.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what + " (last residual " + std::to_string(residual) + ")"), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace spadmm
