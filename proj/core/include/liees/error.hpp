#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace liees {

enum class ErrorKind {
  invalid_parameter,
  invalid_domain,
  invalid_seed,
  numeric_failure,
  resolution,
  divergence,
  calibration,
  construction,
  insufficient_signal,
  validation,
};

const char* to_string(ErrorKind kind) noexcept;

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// State left the finite range; carries the last time with a finite state.
class DivergenceError : public Error {
 public:
  DivergenceError(double last_time, const std::string& what)
      : Error(ErrorKind::divergence, what), last_time_(last_time) {}
  double last_time() const noexcept { return last_time_; }

 private:
  double last_time_;
};

/// Configuration error naming the offending field.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& what)
      : Error(ErrorKind::validation, field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool ok, ErrorKind kind, const std::string& what) {
  if (!ok) fail(kind, what);
}

}  // namespace liees
