#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace noiseval {

// Invalid input: malformed files, schema violations, bad parameters.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parse failure tied to a file and line number.
class ParseError : public ValidationError {
 public:
  ParseError(std::string path, std::size_t line, const std::string& message)
      : ValidationError(path + ":" + std::to_string(line) + ": " + message),
        path_(std::move(path)),
        line_(line) {}

  const std::string& path() const { return path_; }
  std::size_t line() const { return line_; }

 private:
  std::string path_;
  std::size_t line_;
};

// Confusion-table lookup miss for a character without an entry.
class LookupMissError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Metric with an empty denominator or otherwise undefined value.
class UndefinedMetricError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Backend rejected the credential; never retried.
class AuthError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Transient backend failure (timeouts, 429/5xx); eligible for retry.
class TransientBackendError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// All retry attempts against the backend failed.
class BackendExhaustedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace noiseval
