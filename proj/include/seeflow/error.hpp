#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace seeflow {

enum class ErrorKind {
  MissingFrame,
  DimensionMismatch,
  DecodeError,
  IoError,
  SidecarFormat,
  DuplicateEvent,
  UnknownAction,
  BoundsError,
  InvalidSpan,
  MissingLines,
  NotOverlapping,
  InvalidFragmentList,
  ScriptError,
  ParamError,
  InvariantViolation,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MissingFrame: return "MissingFrame";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::DecodeError: return "DecodeError";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::SidecarFormat: return "SidecarFormatError";
    case ErrorKind::DuplicateEvent: return "DuplicateEvent";
    case ErrorKind::UnknownAction: return "UnknownAction";
    case ErrorKind::BoundsError: return "BoundsError";
    case ErrorKind::InvalidSpan: return "InvalidSpan";
    case ErrorKind::MissingLines: return "MissingLines";
    case ErrorKind::NotOverlapping: return "NotOverlapping";
    case ErrorKind::InvalidFragmentList: return "InvalidFragmentList";
    case ErrorKind::ScriptError: return "ScriptError";
    case ErrorKind::ParamError: return "ParamError";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
  }
  return "Unknown";
}

// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// True for kinds that indicate a broken internal invariant rather than bad input.
constexpr bool is_internal(ErrorKind kind) { return kind == ErrorKind::InvariantViolation; }

}  // namespace seeflow
