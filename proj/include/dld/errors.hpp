#pragma once

#include <stdexcept>
#include <string>

namespace dld {

enum class ErrorCode {
  InvalidArgument,
  NonPositiveMultiplier,
  IndexOutOfRange,
  NonFiniteIterate,
  DegenerateRate,
  InsufficientSignal,
  FewerThanK,
  Io,
  Format,
};

const char* to_string(ErrorCode code);

// Single exception type for the library; `code()` lets callers branch on the
// failure class without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonPositiveMultiplier: return "NonPositiveMultiplier";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::NonFiniteIterate: return "NonFiniteIterate";
    case ErrorCode::DegenerateRate: return "DegenerateRate";
    case ErrorCode::InsufficientSignal: return "InsufficientSignal";
    case ErrorCode::FewerThanK: return "FewerThanK";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Format: return "Format";
  }
  return "Unknown";
}

}  // namespace dld
