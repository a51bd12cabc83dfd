#include "pickbench/error.hpp"

namespace pickbench {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NoClosure: return "NoClosure";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::StepLimit: return "StepLimit";
    case ErrorCode::PackingFailure: return "PackingFailure";
    case ErrorCode::CollisionRisk: return "CollisionRisk";
    case ErrorCode::EmptyHistory: return "EmptyHistory";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::ZeroTime: return "ZeroTime";
    case ErrorCode::EmptyMode: return "EmptyMode";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace pickbench
