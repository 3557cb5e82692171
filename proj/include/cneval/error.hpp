#pragma once

#include <stdexcept>
#include <string>

namespace cneval {

// Bad or inconsistent input files and arguments. CLI exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Judge backends and the neural-metric sidecar. CLI exit code 3.
class BackendError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class AuthError : public BackendError {
 public:
  using BackendError::BackendError;
};

// Connection refused, timeouts and other failures that are worth retrying.
class TransportError : public BackendError {
 public:
  using BackendError::BackendError;
};

class HttpStatusError : public BackendError {
 public:
  HttpStatusError(int status, const std::string& what)
      : BackendError(what), status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

// A statistic that is mathematically undefined for its input, e.g. a
// correlation over a zero-variance variable.
class UndefinedStatistic : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace cneval
