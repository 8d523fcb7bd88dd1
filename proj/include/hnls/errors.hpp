#pragma once

#include <stdexcept>
#include <string>

namespace hnls {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on arguments was violated (bad grid shape, mismatched grids, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Non-finite values were found where finite data is required.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Malformed or truncated file contents.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace hnls
