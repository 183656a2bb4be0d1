// Copyright 2026 The gbo-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "gbo/error.hpp"

namespace gbo {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kGridMismatch: return "GridMismatch";
    case ErrorCode::kNonRealOutput: return "NonRealOutput";
    case ErrorCode::kNoConvergence: return "NoConvergence";
    case ErrorCode::kBadExponent: return "BadExponent";
    case ErrorCode::kScaleOutOfRange: return "ScaleOutOfRange";
    case ErrorCode::kWindowTooNarrow: return "WindowTooNarrow";
    case ErrorCode::kNegativeKappa: return "NegativeKappa";
    case ErrorCode::kZeroField: return "ZeroField";
    case ErrorCode::kSpectrumAnomaly: return "SpectrumAnomaly";
    case ErrorCode::kNoRealPair: return "NoRealPair";
    case ErrorCode::kDegenerateNormalization: return "DegenerateNormalization";
    case ErrorCode::kNotOrthogonal: return "NotOrthogonal";
    case ErrorCode::kSolveFailure: return "SolveFailure";
    case ErrorCode::kCompatibilityFailure: return "CompatibilityFailure";
    case ErrorCode::kCriticalExponent: return "CriticalExponent";
    case ErrorCode::kOutOfRange: return "OutOfRange";
    case ErrorCode::kNoCriticalPoint: return "NoCriticalPoint";
    case ErrorCode::kCollisionImminent: return "CollisionImminent";
    case ErrorCode::kStepFloor: return "StepFloor";
    case ErrorCode::kTooEarly: return "TooEarly";
    case ErrorCode::kInsufficientSpan: return "InsufficientSpan";
    case ErrorCode::kBlowupDetected: return "BlowupDetected";
    case ErrorCode::kOverlap: return "Overlap";
    case ErrorCode::kWindowMismatch: return "WindowMismatch";
    case ErrorCode::kDomainTooSmall: return "DomainTooSmall";
    case ErrorCode::kTrackLost: return "TrackLost";
    case ErrorCode::kMissingManifest: return "MissingManifest";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace gbo
