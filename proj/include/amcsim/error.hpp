#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace amcsim {

enum class ErrorCode {
  IllegalMode,
  WrongMode,
  EmptyCell,
  ExpiredRead,
  NoAnchor,
  OutOfRange,
  MissingEntry,
  AddressOutOfRange,
  ZeroDimension,
  OutOfOrder,
  ConfigError,
  TraceError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Parse failure carrying the 1-based line of the offending trace line.
class TraceError : public Error {
 public:
  TraceError(std::size_t line, const std::string& reason)
      : Error(ErrorCode::TraceError, "line " + std::to_string(line) + ": " + reason),
        line_(line),
        reason_(reason) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::size_t line_;
  std::string reason_;
};

}  // namespace amcsim
