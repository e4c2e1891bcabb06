#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tmc {

enum class ErrorKind {
  InvalidArgument,
  DegenerateOrigin,
  UnregisteredFrame,
  OriginUnset,
  OriginAlreadySet,
  InsufficientPoints,
  CollinearConfiguration,
  MalformedLine,
  InvalidField,
  OutOfOrder,
  TimeOutsideSchedule,
  Schema,
  InvariantViolation,
  MisconfiguredSurrogate,
  IncompatibleBinning,
  NegativeCount,
  NonpositiveLength,
  ScriptValidation,
  Io,
};

std::string_view to_string(ErrorKind kind);

/// Base for every error caused by bad input or configuration. The CLI maps
/// these to exit code 2; anything else escaping is an internal error.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Line-level error from a text input (detection log, CSV).
class ParseError : public Error {
 public:
  ParseError(ErrorKind kind, std::size_t line, const std::string& reason)
      : Error(kind, "line " + std::to_string(line) + ": " + reason),
        line_(line),
        reason_(reason) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::size_t line_;
  std::string reason_;
};

}  // namespace tmc
