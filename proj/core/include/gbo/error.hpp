// Copyright 2026 The gbo-lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gbo {

/// Failure categories raised by the library. Every thrown gbo::Error carries
/// one of these so callers (and the CLI exit-code mapping) can branch on it.
enum class ErrorCode {
  kInvalidArgument,
  kGridMismatch,
  kNonRealOutput,
  kNoConvergence,
  kBadExponent,
  kScaleOutOfRange,
  kWindowTooNarrow,
  kNegativeKappa,
  kZeroField,
  kSpectrumAnomaly,
  kNoRealPair,
  kDegenerateNormalization,
  kNotOrthogonal,
  kSolveFailure,
  kCompatibilityFailure,
  kCriticalExponent,
  kOutOfRange,
  kNoCriticalPoint,
  kCollisionImminent,
  kStepFloor,
  kTooEarly,
  kInsufficientSpan,
  kBlowupDetected,
  kOverlap,
  kWindowMismatch,
  kDomainTooSmall,
  kTrackLost,
  kMissingManifest,
  kIo,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Throws Error(code, message) when `condition` is false.
inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) throw Error(code, message);
}

}  // namespace gbo
