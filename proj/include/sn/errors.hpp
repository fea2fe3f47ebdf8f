#pragma once

#include <stdexcept>
#include <string>

namespace sn {

// Error families map onto CLI exit codes: validation 2, numerical 3, I/O 4.

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnknownMaterialError : public ValidationError {
 public:
  UnknownMaterialError(const std::string& name, const std::string& available)
      : ValidationError("unknown material '" + name + "'; available: " + available),
        requested(name) {}
  std::string requested;
};

// Thrown when the wave packet reaches the containment margin of the grid.
class ContainmentError : public NumericalError {
 public:
  ContainmentError(double t, const std::string& what_happened)
      : NumericalError(what_happened), time(t) {}
  double time;
};

class QuadratureError : public NumericalError {
 public:
  QuadratureError(const std::string& msg, double achieved)
      : NumericalError(msg + " (achieved relative error estimate " +
                       std::to_string(achieved) + ")"),
        achieved_rel_error(achieved) {}
  double achieved_rel_error;
};

}  // namespace sn
