#pragma once

#include <stdexcept>
#include <string>

namespace aosa {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unrecognized file layout (bad magic, unsupported version, unparseable text).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// File is well-formed but disagrees with its declared shape.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// Individual values are unusable (zero-norm vectors, bad probabilities, unknown ids).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Invalid user-supplied configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Operation is not valid for the current experiment state.
class StateError : public Error {
 public:
  using Error::Error;
};

/// Caller broke a documented precondition (dimension mismatch, K < 1, ...).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

class TrainingError : public Error {
 public:
  using Error::Error;
};

/// Any failure inside the annotation loop, tagged with the round it happened in.
class ProtocolError : public Error {
 public:
  ProtocolError(std::size_t round, const std::string& what)
      : Error("round " + std::to_string(round) + ": " + what), round_(round) {}

  std::size_t round() const noexcept { return round_; }

 private:
  std::size_t round_;
};

}  // namespace aosa
