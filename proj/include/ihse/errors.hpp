#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ihse {

enum class ErrorCode {
  Usage,
  CriticalEnergy,
  NotPreCollisional,
  Grazing,
  ZeroRelativeVelocity,
  BelowThreshold,
  ExcludedConfiguration,
  Unsupported,
  BranchCrossing,
  NonFinite,
};

std::string_view to_string(ErrorCode code);

// Every recoverable failure in the library is reported through this type; the
// code lets callers (and the CLI exit-status mapping) dispatch without parsing
// messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ihse
