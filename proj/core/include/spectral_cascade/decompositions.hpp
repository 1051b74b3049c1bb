#pragma once

#include <cstdint>
#include <vector>

#include "spectral_cascade/matrix.hpp"

namespace spectral_cascade {

/// cos(2*pi*t) and sin(2*pi*t), exact at multiples of a quarter turn.
double cos_turns(double t);
double sin_turns(double t);

/// Reduce to [0, 1).
double wrap_turns(double t);
/// Reduce to [-1/2, 1/2).
double centered_turns(double t);

/// R_theta: rotation by 2*pi*theta, theta in turns.
Matrix rotation_matrix(double theta);

struct InverseOptions {
  double singular_tol = 1e-14;
  double max_condition = 1e12;
};

/// Inverse by Gauss-Jordan with partial pivoting.
///
/// Throws kSingular when |det| < singular_tol * (product of row 2-norms) and
/// kIllConditioned when the 2-norm condition number exceeds max_condition.
Matrix invert(const Matrix& m, const InverseOptions& opts = {});

/// Singular values in descending order (one-sided Jacobi).
std::vector<double> singular_values(const Matrix& m);

/// sigma_max / sigma_min; infinity for singular input.
double condition_number(const Matrix& m);

struct Polar2x2 {
  Matrix p;            ///< symmetric positive definite factor
  double theta = 0.0;  ///< rotation angle in turns, [0, 1)
};

/// M = P * R_theta with P = sqrt(M M^T). Requires det M > 0.
Polar2x2 polar_decompose_2x2(const Matrix& m);

/// Largest eps_hat such that P * R_eps has real simple spectrum for |eps| < eps_hat:
/// eps_hat = arccos(2 sqrt(det P) / tr P) / (2 pi). Throws kDegenerateP for equal
/// eigenvalues.
double max_real_simple_angle(const Matrix& p);

/// Value mantissa * exp(log_scale).
///
/// Used for matrix powers whose magnitude leaves the double range while the
/// products the algorithms actually need stay representable.
struct ScaledMatrix {
  Matrix mantissa;
  double log_scale = 0.0;

  /// Materialise; throws kOverflow if the result leaves the double range.
  Matrix value() const;
};

/// m^n by binary powering with renormalisation at every step.
ScaledMatrix scaled_power(const Matrix& m, std::int64_t n);

/// a.mantissa * b.mantissa with summed scales, renormalised.
ScaledMatrix operator*(const ScaledMatrix& a, const ScaledMatrix& b);

}  // namespace spectral_cascade
