#include "iliosim/error.hpp"

namespace iliosim {

std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingField: return "MissingField";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::NonUnitVector: return "NonUnitVector";
    case ErrorCode::NotAnExitPoint: return "NotAnExitPoint";
    case ErrorCode::InvalidAngle: return "InvalidAngle";
    case ErrorCode::BehindSource: return "BehindSource";
    case ErrorCode::IllegalInPhase: return "IllegalInPhase";
    case ErrorCode::CursorOutOfRange: return "CursorOutOfRange";
    case ErrorCode::InvalidCommand: return "InvalidCommand";
    case ErrorCode::ScriptError: return "ScriptError";
    case ErrorCode::NotConfirmed: return "NotConfirmed";
    case ErrorCode::EmptyCategory: return "EmptyCategory";
    case ErrorCode::DegenerateTable: return "DegenerateTable";
    case ErrorCode::MissingMetrics: return "MissingMetrics";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::CorruptDocument: return "CorruptDocument";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace iliosim
