#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "spectral_cascade/decompositions.hpp"
#include "spectral_cascade/matrix.hpp"

namespace spectral_cascade {

/// One block of a normal-form diagonal matrix: a nonzero real scalar
/// (size 1) or a scaled rotation |lambda| * R_theta (size 2).
struct DiagonalBlock {
  int size = 1;
  double lambda = 1.0;   ///< size 1 only, signed
  double modulus = 1.0;  ///< size 2 only
  double theta = 0.0;    ///< size 2 only, turns

  static DiagonalBlock scalar(double lambda);
  static DiagonalBlock rotation(double modulus, double theta);

  double abs_value() const;
  double log_abs() const;
  Matrix matrix() const;

  /// Exact power: |lambda|^n enters only through the log scale and the
  /// rotation is evaluated at (n * theta mod 1) with a compensated product.
  ScaledMatrix power(std::int64_t n) const;
  /// Orthogonal (or sign) part of the n-th power.
  Matrix unit_power(std::int64_t n) const;

  friend bool operator==(const DiagonalBlock&, const DiagonalBlock&) = default;
};

/// frac(n * theta) computed with an error-free product; result in [0, 1).
double multiply_turns(std::int64_t n, double theta);

Matrix block_diagonal(std::span<const DiagonalBlock> blocks);

/// (diag[blocks])^n normalised by the largest block modulus.
ScaledMatrix block_diagonal_power(std::span<const DiagonalBlock> blocks, std::int64_t n);

}  // namespace spectral_cascade
