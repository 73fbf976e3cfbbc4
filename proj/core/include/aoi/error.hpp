#pragma once

#include <stdexcept>
#include <string>

namespace aoi {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter or literal violates a documented precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Numerical differentiation of a transform at the origin did not settle, or
/// produced a non-finite moment.
class MomentError : public Error {
 public:
  using Error::Error;
};

/// A search interval does not contain the sought crossing or interior minimum.
class BracketError : public Error {
 public:
  using Error::Error;
};

}  // namespace aoi
