#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wastecollect {

enum class ErrorKind {
  kUnknownNode,
  kUnreachable,
  kNoNodeWithinRange,
  kNegativeUnits,
  kUncoverableDemand,
  kInfeasibleStop,
  kUnreachableStop,
  kShiftTooShort,
  kTooLarge,
  kNegativeInput,
  kZeroDistance,
  kNonpositiveBaseline,
  kInconsistentSummary,
  kInvalidArgument,
  kParse,
  kConfig,
  kIo,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUnknownNode: return "UnknownNode";
    case ErrorKind::kUnreachable: return "Unreachable";
    case ErrorKind::kNoNodeWithinRange: return "NoNodeWithinRange";
    case ErrorKind::kNegativeUnits: return "NegativeUnits";
    case ErrorKind::kUncoverableDemand: return "UncoverableDemand";
    case ErrorKind::kInfeasibleStop: return "InfeasibleStop";
    case ErrorKind::kUnreachableStop: return "UnreachableStop";
    case ErrorKind::kShiftTooShort: return "ShiftTooShort";
    case ErrorKind::kTooLarge: return "TooLarge";
    case ErrorKind::kNegativeInput: return "NegativeInput";
    case ErrorKind::kZeroDistance: return "ZeroDistance";
    case ErrorKind::kNonpositiveBaseline: return "NonpositiveBaseline";
    case ErrorKind::kInconsistentSummary: return "InconsistentSummary";
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kParse: return "Parse";
    case ErrorKind::kConfig: return "Config";
    case ErrorKind::kIo: return "Io";
  }
  return "Unknown";
}

// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace wastecollect
