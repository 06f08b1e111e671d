#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace bwshare {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A configuration or argument violates a documented precondition.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A run-time invariant (feasibility, sum conservation, ...) was breached.
class InvariantError : public Error {
 public:
  InvariantError(const std::string& what, std::size_t step = 0)
      : Error(what), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

// A deadline/response measurement is unusable (R <= 0, non-finite, ...).
class MeasurementError : public Error {
 public:
  using Error::Error;
};

// A joining application cannot be seeded with any bandwidth.
class AdmissionError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Fixed-point iteration ran out of iterations. Carries the last iterate.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> last_iterate,
                   double residual)
      : Error(what), last_iterate_(std::move(last_iterate)), residual_(residual) {}
  const std::vector<double>& last_iterate() const noexcept { return last_iterate_; }
  double residual() const noexcept { return residual_; }

 private:
  std::vector<double> last_iterate_;
  double residual_;
};

}  // namespace bwshare
