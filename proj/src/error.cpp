// Copyright 2026 The percept-tok Authors.
// SPDX-License-Identifier: Apache-2.0

#include "percept_tok/error.hpp"

namespace percept {

std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnknownToken: return "UnknownToken";
    case ErrorCode::kInsufficientData: return "InsufficientData";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kMalformedSequence: return "MalformedSequence";
    case ErrorCode::kInvalidBox: return "InvalidBox";
    case ErrorCode::kMalformedBox: return "MalformedBox";
    case ErrorCode::kInvalidPlan: return "InvalidPlan";
    case ErrorCode::kMissingPair: return "MissingPair";
    case ErrorCode::kDegenerateMarkers: return "DegenerateMarkers";
    case ErrorCode::kIllegalToken: return "IllegalToken";
    case ErrorCode::kMaxLengthExceeded: return "MaxLengthExceeded";
    case ErrorCode::kNoAuxSpan: return "NoAuxSpan";
    case ErrorCode::kSupportMismatch: return "SupportMismatch";
    case ErrorCode::kBadArity: return "BadArity";
    case ErrorCode::kPlacementInfeasible: return "PlacementInfeasible";
    case ErrorCode::kUnparseable: return "Unparseable";
    case ErrorCode::kInvalidGrammar: return "InvalidGrammar";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace percept
