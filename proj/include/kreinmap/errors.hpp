#pragma once

#include <stdexcept>
#include <string>

namespace kreinmap {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data.
class InputError : public Error {
 public:
  using Error::Error;
};

// A restricted Fredholm system is singular: the accelerant condition fails at alpha.
class NotAccelerantError : public Error {
 public:
  NotAccelerantError(const std::string& what, double alpha) : Error(what), alpha_(alpha) {}
  double alpha() const noexcept { return alpha_; }

 private:
  double alpha_;
};

class SingularOperatorError : public Error {
 public:
  SingularOperatorError(const std::string& what, double sigma_min) : Error(what), sigma_min_(sigma_min) {}
  double sigma_min() const noexcept { return sigma_min_; }

 private:
  double sigma_min_;
};

// Triangular factor leaked into the wrong half of the grid.
class SupportViolationError : public Error {
 public:
  SupportViolationError(const std::string& what, double leakage) : Error(what), leakage_(leakage) {}
  double leakage() const noexcept { return leakage_; }

 private:
  double leakage_;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, int iterations, double last_change)
      : Error(what), iterations_(iterations), last_change_(last_change) {}
  int iterations() const noexcept { return iterations_; }
  double last_change() const noexcept { return last_change_; }

 private:
  int iterations_;
  double last_change_;
};

}  // namespace kreinmap
