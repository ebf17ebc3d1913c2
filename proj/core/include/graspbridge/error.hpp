#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace graspbridge {

enum class ErrorCode {
  kInvalidInput,
  kInvalidRotation,
  kEmptyInput,
  kShape,
  kBounds,
  kDegenerateHull,
  kDegeneratePlan,
  kEndpoint,
  kAnnotation,
  kConfig,
  kNumeric,
  kDivergence,
  kFormat,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }
  /// The message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

  /// Same code, message prefixed with `context`.
  static Error wrap(const Error& inner, const std::string& context);

 private:
  ErrorCode code_;
  std::string detail_;
};

/// Process exit code used by the CLI: 2 input, 3 numeric/divergence, 4 format.
int exit_code_for(ErrorCode code);

}  // namespace graspbridge
