#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace stancegraph {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates a documented precondition or type invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

/// A write was attempted while an exclusive pipeline run holds the writer.
class BusyError : public Error {
 public:
  using Error::Error;
};

/// Failure talking to a remote provider. `retryable` marks transient faults
/// (connection errors, 429, 5xx).
class TransportError : public Error {
 public:
  TransportError(const std::string& what, bool retryable) : Error(what), retryable_(retryable) {}

  bool retryable() const noexcept { return retryable_; }

 private:
  bool retryable_;
};

class SnapshotError : public Error {
 public:
  SnapshotError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace stancegraph
