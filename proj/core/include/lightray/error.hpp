#pragma once

#include <stdexcept>
#include <string>

namespace lightray {

// Every failure raised by the library derives from this type. The CLI maps it
// to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a precondition on the caller's input does not hold.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Raised when a numerical procedure cannot deliver its stated accuracy.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace lightray
