#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lhdeform {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Evaluation outside a chart, or a non-finite argument.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Hyperbolic or exponential argument beyond the overflow guard.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Symplectic density too close to zero.
class SingularFormError : public Error {
 public:
  using Error::Error;
};

/// Point lies in the wrong half-plane for the selected chart branch.
class BranchError : public Error {
 public:
  using Error::Error;
};

/// Coefficient expression failed to parse. `offset()` is the byte offset
/// into the source text.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t offset)
      : Error(message + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Coefficient expression produced a non-finite value.
class EvalError : public Error {
 public:
  EvalError(const std::string& message, std::size_t offset)
      : Error(message + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace lhdeform
