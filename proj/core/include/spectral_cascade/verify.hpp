#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "spectral_cascade/codec.hpp"

namespace spectral_cascade {

struct VerifyLine {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double bound = 0.0;
};

struct VerifyReport {
  std::string kind;
  std::vector<VerifyLine> lines;
  bool passed = false;

  const VerifyLine* first_failure() const;
};

/// Re-validates a parsed artifact from its stored matrices.
///
/// Only the linear-algebra layer and the JSON codecs are used: every
/// residual, bound and spectrum is recomputed here, and no routine of the
/// transform, cascade, search or scenario code runs. A malformed artifact
/// yields a failed report, never an exception.
VerifyReport verify_artifact(const Json& artifact);

/// Parses `text`, requires it to be byte-identical to its canonical form and
/// to carry a matching digest, then runs verify_artifact().
VerifyReport verify_artifact_text(std::string_view text);

}  // namespace spectral_cascade
