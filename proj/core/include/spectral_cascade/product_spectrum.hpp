#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "spectral_cascade/diagonal_blocks.hpp"
#include "spectral_cascade/eigen.hpp"
#include "spectral_cascade/matrix.hpp"

namespace spectral_cascade {

/// Eigenvalue stored as log|lambda| and arg(lambda) so that values far outside
/// the double range (e.g. of L * T^n for large n) remain comparable.
struct ScaledEigenvalue {
  double log_abs = 0.0;
  double arg = 0.0;  ///< radians in (-pi, pi]
  bool real = false;

  /// Decimal strings for the real and imaginary part, exponent unbounded.
  std::string real_part_decimal() const;
  std::string imag_part_decimal() const;
};

using ScaledSpectrum = std::vector<ScaledEigenvalue>;

ScaledSpectrum to_scaled(const Spectrum& s);

/// Adds `log_shift` to every modulus.
ScaledSpectrum scale_spectrum(ScaledSpectrum s, double log_shift);

void sort_by_modulus(ScaledSpectrum& s);

/// Same semantics as real_simple_report(): real means |sin(arg)| <= gap_tol.
RealSimpleReport real_simple_report(const ScaledSpectrum& s, double gap_tol);

/// Relative distance |a - b| / max(|a|, |b|) for a modulus-sorted pairing.
double max_relative_mismatch(ScaledSpectrum a, ScaledSpectrum b);

struct ProductSpectrumOptions {
  /// Bits added on top of the estimate of the dynamic range of the product.
  int guard_bits = 96;
  int max_iterations_per_value = 120;
};

/// Direct spectrum of L * diag[blocks]^n.
///
/// The product is formed exactly in MPFR arithmetic with a precision chosen
/// from the spread of the block moduli, then reduced with the Francis QR
/// iteration at that precision. No structure of the product beyond its
/// entries is used.
ScaledSpectrum product_spectrum(const Matrix& l, std::span<const DiagonalBlock> blocks,
                                std::int64_t n, const ProductSpectrumOptions& opts = {});

/// Working precision (bits) product_spectrum() would pick.
int product_spectrum_precision(const Matrix& l, std::span<const DiagonalBlock> blocks,
                               std::int64_t n, const ProductSpectrumOptions& opts = {});

/// Spectrum of a double matrix through the same high-precision path, `bits` fixed.
ScaledSpectrum eigenvalues_high_precision(const Matrix& m, int bits);

}  // namespace spectral_cascade
