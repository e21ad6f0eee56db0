#include "gqads/errors.hpp"

namespace gqads {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidThreshold: return "InvalidThreshold";
    case ErrorCode::InvalidShare: return "InvalidShare";
    case ErrorCode::InvalidMode: return "InvalidMode";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::KeyTooShort: return "KeyTooShort";
    case ErrorCode::RTooLarge: return "RTooLarge";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::FingerprintMismatch: return "FingerprintMismatch";
    case ErrorCode::EEqualsZero: return "EEqualsZero";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::EmptyFeasibleSet: return "EmptyFeasibleSet";
    case ErrorCode::NoDivisors: return "NoDivisors";
    case ErrorCode::UnknownFigure: return "UnknownFigure";
    case ErrorCode::InfeasibleTargets: return "InfeasibleTargets";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IOError: return "IOError";
  }
  return "Unknown";
}

}  // namespace gqads
