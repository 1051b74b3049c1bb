#include "spectral_cascade/decompositions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "spectral_cascade/error.hpp"

namespace spectral_cascade {

namespace {

// sin/cos of 2*pi*t after reduction to an octant, so quarter turns are exact.
void sincos_turns(double t, double& s, double& c) {
  double r = t - std::floor(t);
  const double q = std::nearbyint(4.0 * r);
  r -= q / 4.0;  // exact: |r| <= 1/8
  const double x = 2.0 * std::numbers::pi * r;
  const double sr = r == 0.0 ? 0.0 : std::sin(x);
  const double cr = r == 0.0 ? 1.0 : std::cos(x);
  switch (static_cast<int>(q) & 3) {
    case 0: s = sr; c = cr; break;
    case 1: s = cr; c = -sr; break;
    case 2: s = -sr; c = -cr; break;
    default: s = -cr; c = sr; break;
  }
}

constexpr double kLogOverflow = 690.7755278982137;  // log(1e300)

}  // namespace

double cos_turns(double t) {
  double s, c;
  sincos_turns(t, s, c);
  return c;
}

double sin_turns(double t) {
  double s, c;
  sincos_turns(t, s, c);
  return s;
}

double wrap_turns(double t) {
  double r = t - std::floor(t);
  if (r >= 1.0) r = 0.0;
  return r;
}

double centered_turns(double t) {
  double r = wrap_turns(t);
  if (r >= 0.5) r -= 1.0;
  return r;
}

Matrix rotation_matrix(double theta) {
  if (!std::isfinite(theta)) throw Error(ErrorKind::kInvalidArgument, "rotation angle not finite");
  double s, c;
  sincos_turns(theta, s, c);
  return Matrix{{c, -s}, {s, c}};
}

Matrix invert(const Matrix& m, const InverseOptions& opts) {
  if (!m.is_square()) throw Error(ErrorKind::kSizeMismatch, "invert: matrix not square");
  m.require_finite("invert");
  const std::size_t n = m.rows();

  double row_scale = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s = std::hypot(s, m(i, j));
    row_scale *= s;
  }

  Matrix a = m;
  Matrix inv = Matrix::identity(n);
  double det = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
    if (a(piv, k) == 0.0) throw Error(ErrorKind::kSingular, "zero pivot");
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(a(k, j), a(piv, j));
        std::swap(inv(k, j), inv(piv, j));
      }
      det = -det;
    }
    const double p = a(k, k);
    det *= p;
    for (std::size_t j = 0; j < n; ++j) {
      a(k, j) /= p;
      inv(k, j) /= p;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k) continue;
      const double f = a(i, k);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        a(i, j) -= f * a(k, j);
        inv(i, j) -= f * inv(k, j);
      }
    }
  }
  if (!(std::abs(det) >= opts.singular_tol * row_scale)) {
    throw Error(ErrorKind::kSingular, "|det| below threshold relative to row norms");
  }
  const double cond = condition_number(m);
  if (cond > opts.max_condition) {
    throw Error(ErrorKind::kIllConditioned, "condition number " + std::to_string(cond));
  }
  return inv;
}

std::vector<double> singular_values(const Matrix& m) {
  if (m.empty()) return {};
  Matrix a = m.rows() >= m.cols() ? m : m.transpose();
  const std::size_t rows = a.rows();
  const std::size_t cols = a.cols();

  // Rescale by a power of two so squared column norms can neither overflow
  // nor underflow; exact even for subnormal input.
  const double peak = a.max_abs();
  if (peak == 0.0) return std::vector<double>(cols, 0.0);
  const int shift = std::ilogb(peak);
  for (double& x : a.data()) x = std::scalbn(x, -shift);

  constexpr double kEps = std::numeric_limits<double>::epsilon();
  for (int sweep = 0; sweep < 80; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < cols; ++p) {
      for (std::size_t q = p + 1; q < cols; ++q) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t i = 0; i < rows; ++i) {
          alpha += a(i, p) * a(i, p);
          beta += a(i, q) * a(i, q);
          gamma += a(i, p) * a(i, q);
        }
        if (gamma == 0.0 || std::abs(gamma) <= kEps * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::hypot(1.0, zeta));
        const double c = 1.0 / std::hypot(1.0, t);
        const double s = c * t;
        for (std::size_t i = 0; i < rows; ++i) {
          const double x = a(i, p);
          const double y = a(i, q);
          a(i, p) = c * x - s * y;
          a(i, q) = s * x + c * y;
        }
      }
    }
    if (!rotated) break;
  }

  std::vector<double> sv(cols);
  for (std::size_t j = 0; j < cols; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < rows; ++i) s = std::hypot(s, a(i, j));
    sv[j] = std::scalbn(s, shift);
  }
  std::sort(sv.begin(), sv.end(), std::greater<>());
  return sv;
}

double condition_number(const Matrix& m) {
  const auto sv = singular_values(m);
  if (sv.empty() || sv.back() == 0.0) return std::numeric_limits<double>::infinity();
  return sv.front() / sv.back();
}

Polar2x2 polar_decompose_2x2(const Matrix& m) {
  if (m.rows() != 2 || m.cols() != 2) throw Error(ErrorKind::kSizeMismatch, "polar needs 2x2");
  m.require_finite("polar_decompose_2x2");
  const double a = m(0, 0), b = m(0, 1), c = m(1, 0), d = m(1, 1);
  const double det = a * d - b * c;
  const double row_scale = std::hypot(a, b) * std::hypot(c, d);
  if (!(std::abs(det) >= 1e-14 * row_scale) || row_scale == 0.0) {
    throw Error(ErrorKind::kSingular, "polar_decompose_2x2 of a singular matrix");
  }
  if (det < 0.0) {
    throw Error(ErrorKind::kNegativeDeterminant, "polar_decompose_2x2: det < 0 (reflection)");
  }
  // For det > 0 the orthogonal polar factor is the rotation whose angle is the
  // argument of (a + d) + i (c - b).
  const double angle = std::atan2(c - b, a + d);
  const double theta = wrap_turns(angle / (2.0 * std::numbers::pi));
  const double cs = std::cos(angle), sn = std::sin(angle);
  // P = M R^T, then symmetrised (the skew part is rounding only).
  const double p00 = a * cs - b * sn;
  const double p01 = a * sn + b * cs;
  const double p10 = c * cs - d * sn;
  const double p11 = c * sn + d * cs;
  const double off = 0.5 * (p01 + p10);
  return {Matrix{{p00, off}, {off, p11}}, theta};
}

double max_real_simple_angle(const Matrix& p) {
  if (p.rows() != 2 || p.cols() != 2) throw Error(ErrorKind::kSizeMismatch, "needs 2x2 P");
  const double tr = p.trace();
  const double det = p(0, 0) * p(1, 1) - p(0, 1) * p(1, 0);
  const double asym = std::abs(p(0, 1) - p(1, 0));
  if (asym > 1e-10 * std::max(1.0, p.max_abs()) || !(det > 0.0) || !(tr > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "P must be symmetric positive definite");
  }
  // Eigenvalue gap = sqrt(tr^2 - 4 det); degenerate when it vanishes at rounding level.
  const double disc = (p(0, 0) - p(1, 1)) * (p(0, 0) - p(1, 1)) + 4.0 * p(0, 1) * p(1, 0);
  if (!(std::sqrt(std::max(disc, 0.0)) > 1e-12 * tr)) {
    throw Error(ErrorKind::kDegenerateP, "P has equal eigenvalues");
  }
  const double ratio = std::min(1.0, 2.0 * std::sqrt(det) / tr);
  return std::acos(ratio) / (2.0 * std::numbers::pi);
}

Matrix ScaledMatrix::value() const {
  const double peak = mantissa.max_abs();
  if (peak == 0.0) return mantissa;
  if (log_scale + std::log(peak) > kLogOverflow) {
    throw Error(ErrorKind::kOverflow, "scaled matrix exceeds 1e300");
  }
  Matrix out = mantissa;
  if (std::abs(log_scale) < 600.0) {
    out *= std::exp(log_scale);
  } else {
    const double half = std::exp(0.5 * log_scale);
    out *= half;
    out *= half;
  }
  return out;
}

namespace {

ScaledMatrix normalised(Matrix m, double log_scale) {
  const double peak = m.max_abs();
  if (peak == 0.0 || !std::isfinite(peak)) {
    if (!std::isfinite(peak)) throw Error(ErrorKind::kOverflow, "non-finite mantissa");
    return {std::move(m), 0.0};
  }
  for (double& x : m.data()) x /= peak;
  return {std::move(m), log_scale + std::log(peak)};
}

}  // namespace

ScaledMatrix operator*(const ScaledMatrix& a, const ScaledMatrix& b) {
  return normalised(a.mantissa * b.mantissa, a.log_scale + b.log_scale);
}

ScaledMatrix scaled_power(const Matrix& m, std::int64_t n) {
  if (!m.is_square()) throw Error(ErrorKind::kSizeMismatch, "power of non-square matrix");
  if (n < 0) throw Error(ErrorKind::kInvalidArgument, "negative exponent");
  ScaledMatrix result{Matrix::identity(m.rows()), 0.0};
  ScaledMatrix base = normalised(m, 0.0);
  while (n > 0) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n > 0) base = base * base;
  }
  return result;
}

}  // namespace spectral_cascade
