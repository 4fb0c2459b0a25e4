#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rdecusum {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument violates a documented precondition.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A detector was driven out of its two-phase protocol (update without a
/// matching next_action, or any call after an alarm).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// A Monte-Carlo estimator could not produce a trustworthy number.
class EstimationError : public Error {
 public:
  enum class Kind { Failed, Unstable };

  EstimationError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

  [[nodiscard]] Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// Malformed input file. `line` is 1-based; 0 means the whole file.
class ParseError : public Error {
 public:
  ParseError(std::string source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what),
        source_(std::move(source)),
        line_(line) {}

  [[nodiscard]] const std::string& source() const noexcept { return source_; }
  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::string source_;
  std::size_t line_;
};

/// A configuration document is structurally valid but violates the schema.
class SchemaError : public Error {
 public:
  SchemaError(std::string key_path, const std::string& what)
      : Error(key_path + ": " + what), key_path_(std::move(key_path)) {}

  [[nodiscard]] const std::string& key_path() const noexcept { return key_path_; }

 private:
  std::string key_path_;
};

}  // namespace rdecusum
