#pragma once

#include <stdexcept>
#include <string>

namespace gaugelab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (range, sign, size, normalization).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A path or configuration touches a singular point (winding origin, particle coincidence).
class DegenerateGeometry : public Error {
 public:
  using Error::Error;
};

/// Time step exceeds the stability/accuracy bound of the lattice propagator.
class StepBoundError : public InvalidArgument {
 public:
  StepBoundError(const std::string& what, double bound) : InvalidArgument(what), bound_(bound) {}
  double bound() const noexcept { return bound_; }

 private:
  double bound_;
};

/// Iterative solver did not reach the requested residual.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Interferometer packets did not overlap enough to define a relative phase.
class RecombinationError : public Error {
 public:
  using Error::Error;
};

}  // namespace gaugelab
