#pragma once

#include <stdexcept>
#include <string>

namespace psd {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two objects that must live on the same grid do not.
class GridMismatch : public Error {
 public:
  using Error::Error;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A scenario parameter set violates a named resolvability constraint.
class ResolvabilityError : public InvalidArgument {
 public:
  ResolvabilityError(std::string constraint, const std::string& detail)
      : InvalidArgument(constraint + ": " + detail), constraint_(std::move(constraint)) {}

  const std::string& constraint() const noexcept { return constraint_; }

 private:
  std::string constraint_;
};

/// Numerical integration had to stop (overflow, truncation leakage, boundary contact).
class NumericalAbort : public Error {
 public:
  using Error::Error;
};

}  // namespace psd
