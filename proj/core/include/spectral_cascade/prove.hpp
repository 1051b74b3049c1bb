#pragma once

#include <cstdint>
#include <vector>

#include "spectral_cascade/cascade.hpp"
#include "spectral_cascade/scenario.hpp"
#include "spectral_cascade/search.hpp"

namespace spectral_cascade {

struct ProofReport {
  ConditionReport conditions;
  ParameterCascade cascade;
  CascadeResult sample;  ///< decomposition at the first scanned exponent
  std::vector<PolarForm> polar;
  SearchReport search;
};

/// Conditions, parameters, a sample decomposition, and the subsequence scan
/// along a n + b. Throws kConditionFailure before any numeric work when L
/// fails its conditions; SearchExhausted when fewer than `count` hits exist.
ProofReport prove_instance(const InstanceSpec& instance, double eps0, std::int64_t a,
                           std::int64_t b, std::size_t count, std::int64_t n_max,
                           const SearchOptions& opts = {});

}  // namespace spectral_cascade
