#pragma once

#include <complex>
#include <vector>

#include "spectral_cascade/matrix.hpp"

namespace spectral_cascade {

/// Eigenvalues with multiplicity; non-real values appear in conjugate pairs.
using Spectrum = std::vector<std::complex<double>>;

struct EigenOptions {
  int max_iterations_per_value = 60;
  bool balance = true;
};

/// Balancing, Householder reduction to Hessenberg form and the Francis
/// double-shift QR iteration. Throws kConvergenceFailure past the iteration cap.
Spectrum eigenvalues(const Matrix& m, const EigenOptions& opts = {});

/// Independent route: simultaneous Aberth-Ehrlich iteration on det(M - zI),
/// with the logarithmic derivative -tr((M - zI)^{-1}) evaluated by complex LU.
/// Shares no code with eigenvalues(); intended as a cross-check for small d.
Spectrum eigenvalues_aberth(const Matrix& m, int max_iterations = 500);

struct RealSimpleReport {
  bool real_simple = false;
  /// Relative modulus gaps (|l_(i)| - |l_(i+1)|) / |l_(i)| in descending order of modulus.
  std::vector<double> gaps;
  double min_gap = 0.0;
  /// max |Im l| / |l| over the spectrum.
  double max_imag_ratio = 0.0;
};

RealSimpleReport real_simple_report(const Spectrum& spectrum, double gap_tol);
RealSimpleReport has_real_simple_spectrum(const Matrix& m, double gap_tol = 1e-9);

/// Pairs two spectra by descending modulus (ties broken by imaginary part) and
/// returns the largest |a_i - b_i| / max(|a_i|, |b_i|).
double max_relative_mismatch(Spectrum a, Spectrum b);

/// Sorted by descending modulus, conjugate pairs with positive imaginary part first.
void sort_by_modulus(Spectrum& s);

}  // namespace spectral_cascade
