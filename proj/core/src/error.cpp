#include "graspbridge/error.hpp"

namespace graspbridge {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidInput: return "invalid-input";
    case ErrorCode::kInvalidRotation: return "invalid-rotation";
    case ErrorCode::kEmptyInput: return "empty-input";
    case ErrorCode::kShape: return "shape";
    case ErrorCode::kBounds: return "bounds";
    case ErrorCode::kDegenerateHull: return "degenerate-hull";
    case ErrorCode::kDegeneratePlan: return "degenerate-plan";
    case ErrorCode::kEndpoint: return "endpoint";
    case ErrorCode::kAnnotation: return "annotation";
    case ErrorCode::kConfig: return "config";
    case ErrorCode::kNumeric: return "numeric";
    case ErrorCode::kDivergence: return "divergence";
    case ErrorCode::kFormat: return "format";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), detail_(what) {}

Error Error::wrap(const Error& inner, const std::string& context) {
  return Error(inner.code(), context + ": " + inner.detail());
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNumeric:
    case ErrorCode::kDivergence:
      return 3;
    case ErrorCode::kFormat:
      return 4;
    default:
      return 2;
  }
}

}  // namespace graspbridge
