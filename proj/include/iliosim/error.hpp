#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace iliosim {

enum class ErrorCode {
  MissingField,
  ValidationError,
  NonUnitVector,
  NotAnExitPoint,
  InvalidAngle,
  BehindSource,
  IllegalInPhase,
  CursorOutOfRange,
  InvalidCommand,
  ScriptError,
  NotConfirmed,
  EmptyCategory,
  DegenerateTable,
  MissingMetrics,
  NotFound,
  VersionMismatch,
  CorruptDocument,
  ParseError,
};

std::string_view error_name(ErrorCode code);

// Every failure the library reports carries one of the codes above. The
// service maps codes to HTTP statuses and the CLI prints error_name().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  std::string_view name() const noexcept { return error_name(code_); }

 private:
  ErrorCode code_;
};

// Raised by replay: wraps the first failing command's error with its
// position in the script.
class ScriptError : public Error {
 public:
  ScriptError(std::size_t index, const Error& cause)
      : Error(ErrorCode::ScriptError,
              "command " + std::to_string(index) + " rejected (" + cause.what() + ")"),
        index_(index),
        cause_(cause.code()) {}

  std::size_t index() const noexcept { return index_; }
  ErrorCode cause() const noexcept { return cause_; }

 private:
  std::size_t index_;
  ErrorCode cause_;
};

}  // namespace iliosim
