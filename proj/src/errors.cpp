#include "eitsim/errors.hpp"

namespace eitsim {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptySector: return "EmptySector";
    case ErrorCode::kBasisMismatch: return "BasisMismatch";
    case ErrorCode::kNotHermitian: return "NotHermitian";
    case ErrorCode::kCutoffTooSmall: return "CutoffTooSmall";
    case ErrorCode::kDimensionOverflow: return "DimensionOverflow";
    case ErrorCode::kInvalidParams: return "InvalidParams";
    case ErrorCode::kStepTooLarge: return "StepTooLarge";
    case ErrorCode::kProfileNotClosing: return "ProfileNotClosing";
    case ErrorCode::kInvalidDensityMatrix: return "InvalidDensityMatrix";
    case ErrorCode::kConfig: return "ConfigError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace eitsim
