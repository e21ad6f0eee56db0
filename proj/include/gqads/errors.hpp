#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gqads {

enum class ErrorCode {
  InvalidThreshold,
  InvalidShare,
  InvalidMode,
  InvalidParams,
  KeyTooShort,
  RTooLarge,
  LengthMismatch,
  FingerprintMismatch,
  EEqualsZero,
  DomainError,
  EmptyFeasibleSet,
  NoDivisors,
  UnknownFigure,
  InfeasibleTargets,
  ParseError,
  IOError,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries a machine-checkable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace gqads
