#include "spectral_cascade/error.hpp"

namespace spectral_cascade {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kSizeMismatch: return "SizeMismatch";
    case ErrorKind::kSingular: return "Singular";
    case ErrorKind::kIllConditioned: return "IllConditioned";
    case ErrorKind::kNegativeDeterminant: return "NegativeDeterminant";
    case ErrorKind::kDegenerateP: return "DegenerateP";
    case ErrorKind::kConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::kNoConvergence: return "NoConvergence";
    case ErrorKind::kOverflow: return "Overflow";
    case ErrorKind::kHypothesisFailure: return "HypothesisFailure";
    case ErrorKind::kCertificateFailure: return "CertificateFailure";
    case ErrorKind::kConditionFailure: return "ConditionFailure";
    case ErrorKind::kEpsilonTooLarge: return "EpsilonTooLarge";
    case ErrorKind::kStageFailure: return "StageFailure";
    case ErrorKind::kIndependenceFailure: return "IndependenceFailure";
    case ErrorKind::kPerturbationExhausted: return "PerturbationExhausted";
    case ErrorKind::kResonanceFound: return "ResonanceFound";
    case ErrorKind::kSearchExhausted: return "SearchExhausted";
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kParse: return "Parse";
  }
  return "Unknown";
}

}  // namespace spectral_cascade
