#include "spectral_cascade/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hqr.hpp"
#include "pairing.hpp"
#include "spectral_cascade/error.hpp"

namespace spectral_cascade {

namespace {

using cplx = std::complex<double>;

bool modulus_order(const cplx& a, const cplx& b) {
  const double ma = std::abs(a), mb = std::abs(b);
  if (ma != mb) return ma > mb;
  if (a.imag() != b.imag()) return a.imag() > b.imag();
  return a.real() > b.real();
}

}  // namespace

Spectrum eigenvalues(const Matrix& m, const EigenOptions& opts) {
  if (!m.is_square()) throw Error(ErrorKind::kSizeMismatch, "eigenvalues of non-square matrix");
  m.require_finite("eigenvalues");
  const std::size_t n = m.rows();
  detail::SquareArray<double> a(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = m(i, j);
  if (opts.balance) detail::balance(a);
  detail::hessenberg(a);
  std::vector<double> wr, wi;
  if (!detail::hqr(a, wr, wi, opts.max_iterations_per_value,
                   std::numeric_limits<double>::epsilon())) {
    throw Error(ErrorKind::kConvergenceFailure, "QR iteration cap exceeded");
  }
  Spectrum out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = {wr[i], wi[i]};
  sort_by_modulus(out);
  return out;
}

namespace {

// tr((M - zI)^{-1}) by complex LU with partial pivoting; sets `singular` when
// z is an eigenvalue to working precision.
cplx resolvent_trace(const Matrix& m, cplx z, bool& singular) {
  const std::size_t n = m.rows();
  std::vector<cplx> lu(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) lu[i * n + j] = m(i, j) - (i == j ? z : cplx(0.0));
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  singular = false;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(lu[i * n + k]) > std::abs(lu[piv * n + k])) piv = i;
    if (lu[piv * n + k] == cplx(0.0)) {
      singular = true;
      return 0.0;
    }
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu[k * n + j], lu[piv * n + j]);
      std::swap(perm[k], perm[piv]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const cplx f = lu[i * n + k] / lu[k * n + k];
      lu[i * n + k] = f;
      for (std::size_t j = k + 1; j < n; ++j) lu[i * n + j] -= f * lu[k * n + j];
    }
  }
  // Diagonal of the inverse: solve for each unit vector.
  cplx tr = 0.0;
  std::vector<cplx> x(n);
  for (std::size_t col = 0; col < n; ++col) {
    for (std::size_t i = 0; i < n; ++i) x[i] = perm[i] == col ? 1.0 : 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < i; ++j) x[i] -= lu[i * n + j] * x[j];
    for (std::size_t i = n; i-- > 0;) {
      for (std::size_t j = i + 1; j < n; ++j) x[i] -= lu[i * n + j] * x[j];
      x[i] /= lu[i * n + i];
    }
    tr += x[col];
  }
  return tr;
}

}  // namespace

Spectrum eigenvalues_aberth(const Matrix& m, int max_iterations) {
  if (!m.is_square()) throw Error(ErrorKind::kSizeMismatch, "eigenvalues of non-square matrix");
  m.require_finite("eigenvalues_aberth");
  const std::size_t n = m.rows();
  if (n == 0) return {};
  // Start on a circle whose radius is the geometric mean of the spectrum
  // modulus bounds |det|^(1/n) and the Frobenius norm.
  double radius = m.frobenius_norm();
  const double det = std::abs(determinant(m));
  if (det > 0.0) radius = std::sqrt(radius * std::pow(det, 1.0 / static_cast<double>(n)));
  if (radius == 0.0) return Spectrum(n, 0.0);
  std::vector<cplx> z(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double ang = 2.0 * std::numbers::pi * (static_cast<double>(k) + 0.25) /
                           static_cast<double>(n) + 0.4;
    z[k] = std::polar(radius, ang);
  }
  std::vector<bool> frozen(n, false);
  std::vector<double> last_step(n, std::numeric_limits<double>::infinity());
  constexpr double kTol = 4.0 * std::numeric_limits<double>::epsilon();
  bool converged = false;
  for (int it = 0; it < max_iterations && !converged; ++it) {
    converged = true;
    for (std::size_t k = 0; k < n; ++k) {
      if (frozen[k]) continue;
      bool singular = false;
      const cplx tr = resolvent_trace(m, z[k], singular);
      if (singular || tr == cplx(0.0)) {
        frozen[k] = true;
        continue;
      }
      const cplx newton = -1.0 / tr;  // p(z) / p'(z) for p(z) = det(M - zI)
      cplx repulsion = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != k) repulsion += 1.0 / (z[k] - z[j]);
      const cplx step = newton / (1.0 - newton * repulsion);
      z[k] -= step;
      // Converged at working precision, or stalled on rounding noise once
      // the quadratic phase has ended.
      const double size = std::abs(step);
      if (size <= kTol * std::abs(z[k]) ||
          (size <= 1e-10 * std::abs(z[k]) && size >= 0.5 * last_step[k])) {
        frozen[k] = true;
      } else {
        converged = false;
      }
      last_step[k] = size;
    }
  }
  if (!converged) {
    for (bool f : frozen)
      if (!f) throw Error(ErrorKind::kConvergenceFailure, "Aberth iteration cap exceeded");
  }
  // A real matrix has a conjugate-symmetric spectrum; remove the rounding-level
  // imaginary parts of real roots and symmetrise pairs.
  Spectrum out(z.begin(), z.end());
  for (auto& v : out)
    if (std::abs(v.imag()) <= 1e-12 * std::abs(v)) v = {v.real(), 0.0};
  sort_by_modulus(out);
  return out;
}

RealSimpleReport real_simple_report(const Spectrum& spectrum, double gap_tol) {
  Spectrum s = spectrum;
  sort_by_modulus(s);
  RealSimpleReport rep;
  rep.real_simple = true;
  for (const auto& v : s) {
    const double mod = std::abs(v);
    const double ratio = mod == 0.0 ? 0.0 : std::abs(v.imag()) / mod;
    rep.max_imag_ratio = std::max(rep.max_imag_ratio, ratio);
    if (ratio > gap_tol) rep.real_simple = false;
  }
  rep.min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    const double hi = std::abs(s[i]), lo = std::abs(s[i + 1]);
    const double gap = hi == 0.0 ? 0.0 : (hi - lo) / hi;
    rep.gaps.push_back(gap);
    rep.min_gap = std::min(rep.min_gap, gap);
    if (!(gap > gap_tol)) rep.real_simple = false;
  }
  return rep;
}

RealSimpleReport has_real_simple_spectrum(const Matrix& m, double gap_tol) {
  return real_simple_report(eigenvalues(m), gap_tol);
}

double max_relative_mismatch(Spectrum a, Spectrum b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  sort_by_modulus(a);
  sort_by_modulus(b);
  const auto tied = [&](std::size_t i, std::size_t j) {
    return std::abs(a[i]) - std::abs(a[j]) <= 1e-6 * std::abs(a[i]);
  };
  return detail::grouped_pairing(a.size(), tied, [&](std::size_t i, std::size_t j) {
    const double scale = std::max(std::abs(a[i]), std::abs(b[j]));
    return scale == 0.0 ? 0.0 : std::abs(a[i] - b[j]) / scale;
  });
}

void sort_by_modulus(Spectrum& s) { std::sort(s.begin(), s.end(), modulus_order); }

}  // namespace spectral_cascade
