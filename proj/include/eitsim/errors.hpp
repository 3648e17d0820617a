#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace eitsim {

enum class ErrorCode {
  kEmptySector,
  kBasisMismatch,
  kNotHermitian,
  kCutoffTooSmall,
  kDimensionOverflow,
  kInvalidParams,
  kStepTooLarge,
  kProfileNotClosing,
  kInvalidDensityMatrix,
  kConfig,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above so the
// CLI can map it onto an exit status without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace eitsim
