#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace topicbench {

enum class ErrorCode {
  Io,
  Parse,
  RowCount,
  DimensionMismatch,
  NonFinite,
  Duplicate,
  MissingId,
  ZeroNorm,
  DegenerateChunk,
  DisconnectedPoint,
  EmptyEvaluation,
  InvalidArgument,
  IncompleteGrid,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Io: return "io";
    case ErrorCode::Parse: return "parse";
    case ErrorCode::RowCount: return "row-count";
    case ErrorCode::DimensionMismatch: return "dimension-mismatch";
    case ErrorCode::NonFinite: return "non-finite";
    case ErrorCode::Duplicate: return "duplicate";
    case ErrorCode::MissingId: return "missing-id";
    case ErrorCode::ZeroNorm: return "zero-norm";
    case ErrorCode::DegenerateChunk: return "degenerate-chunk";
    case ErrorCode::DisconnectedPoint: return "disconnected-point";
    case ErrorCode::EmptyEvaluation: return "empty-evaluation";
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::IncompleteGrid: return "incomplete-grid";
  }
  return "unknown";
}

/// Data or contract violation. The CLI maps these to exit code 2.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace topicbench
