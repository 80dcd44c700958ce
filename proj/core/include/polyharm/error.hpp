#pragma once

#include <stdexcept>
#include <string>

namespace polyharm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument violates an operation's precondition (out-of-range axis,
/// evaluation at the origin, invalid (m, n), ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure could not reach its tolerance within its budget.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A symbolic reduction produced a shape other than the one required.
class ShapeError : public Error {
 public:
  using Error::Error;
};

}  // namespace polyharm
