#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gmeasure {

enum class ErrorCode {
  kValidation,
  kResourceCap,
  kOrderingViolated,
  kConstructionMismatch,
  kCapability,
  kNotApplicable,
  kUndefinedResidual,
};

std::string_view error_code_name(ErrorCode code);

// Every library failure goes through this type; the CLI maps code() to its exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, const std::string& message) {
  if (!condition) fail(ErrorCode::kValidation, message);
}

}  // namespace gmeasure
