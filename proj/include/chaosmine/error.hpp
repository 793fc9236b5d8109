#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace chaosmine {

// Base class of every error raised by the library. `code()` is a short
// stable token used by the CLI and the HTTP layer.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& message) : Error("invalid_argument", message) {}
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column)
      : Error("parse_error", message + " (line " + std::to_string(line) + ", column " +
                                 std::to_string(column) + ")"),
        line_(line),
        column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class StaleSchedule : public Error {
 public:
  explicit StaleSchedule(const std::string& message) : Error("stale_schedule", message) {}
};

class UndefinedDistribution : public Error {
 public:
  explicit UndefinedDistribution(const std::string& message)
      : Error("undefined_distribution", message) {}
};

}  // namespace chaosmine
