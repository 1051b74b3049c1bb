#pragma once

#include <stdexcept>
#include <string>

namespace spectral_cascade {

/// Failure categories. The CLI maps them onto exit codes.
enum class ErrorKind {
  kSizeMismatch,
  kSingular,
  kIllConditioned,
  kNegativeDeterminant,
  kDegenerateP,
  kConvergenceFailure,
  kNoConvergence,
  kOverflow,
  kHypothesisFailure,
  kCertificateFailure,
  kConditionFailure,
  kEpsilonTooLarge,
  kStageFailure,
  kIndependenceFailure,
  kPerturbationExhausted,
  kResonanceFound,
  kSearchExhausted,
  kInvalidArgument,
  kParse,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised by the cascade when a single level fails; carries the 1-based level.
class StageError : public Error {
 public:
  StageError(int level, const std::string& what)
      : Error(ErrorKind::kStageFailure, "level " + std::to_string(level) + ": " + what),
        level_(level) {}

  int level() const noexcept { return level_; }

 private:
  int level_;
};

}  // namespace spectral_cascade
