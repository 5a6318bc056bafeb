#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wzmap {

// Error categories surfaced by the library. The CLI maps them onto exit codes.
enum class ErrorCode {
  kInvalidSpec,
  kParseError,
  kIoError,
  kEmptyData,
  kDegenerateData,
  kSingularCovariance,
  kGridMismatch,
  kNoPredictedFree,
  kGoalOccupied,
  kStartOrGoalOccupied,
  kNoPath,
  kEmptyPath,
  kEmptyTrace,
  kConfigParse,
  kMissingArtifact,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace wzmap
