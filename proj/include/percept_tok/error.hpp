// Copyright 2026 The percept-tok Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace percept {

enum class ErrorCode {
  kUnknownToken,
  kInsufficientData,
  kShapeMismatch,
  kIndexOutOfRange,
  kMalformedSequence,
  kInvalidBox,
  kMalformedBox,
  kInvalidPlan,
  kMissingPair,
  kDegenerateMarkers,
  kIllegalToken,
  kMaxLengthExceeded,
  kNoAuxSpan,
  kSupportMismatch,
  kBadArity,
  kPlacementInfeasible,
  kUnparseable,
  kInvalidGrammar,
  kInvalidArgument,
  kIoError,
};

/// Stable machine-readable name, e.g. "MalformedSequence".
std::string_view error_name(ErrorCode code);

/// All library failures surface as this exception; `code()` carries the
/// contract-level error kind so callers (and the CLI) can report it.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  std::string_view name() const { return error_name(code_); }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace percept
