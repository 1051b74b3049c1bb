#include "spectral_cascade/product_spectrum.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <numbers>

#include "bigfloat.hpp"
#include "hqr.hpp"
#include "pairing.hpp"
#include "spectral_cascade/error.hpp"

namespace spectral_cascade {

namespace {

using detail::BigFloat;

std::string decimal_from_log(double log_abs, double factor) {
  if (factor == 0.0 || log_abs == -std::numeric_limits<double>::infinity()) return "0";
  const double direct_log = log_abs + std::log(std::abs(factor));
  char buf[64];
  if (direct_log < 700.0 && direct_log > -700.0) {
    std::snprintf(buf, sizeof buf, "%.17g", std::exp(log_abs) * factor);
    return buf;
  }
  const double l10 = direct_log / std::numbers::ln10;
  const double e = std::floor(l10);
  double mant = std::pow(10.0, l10 - e);
  if (factor < 0.0) mant = -mant;
  std::snprintf(buf, sizeof buf, "%.15ge%+" PRId64, mant, static_cast<std::int64_t>(e));
  return buf;
}

double real_factor(const ScaledEigenvalue& v) { return v.real ? (std::abs(v.arg) > 1.0 ? -1.0 : 1.0) : std::cos(v.arg); }
double imag_factor(const ScaledEigenvalue& v) { return v.real ? 0.0 : std::sin(v.arg); }

ScaledSpectrum collect(detail::SquareArray<BigFloat>& a, int max_its, mpfr_prec_t bits) {
  std::vector<BigFloat> wr, wi;
  BigFloat eps(1.0);
  mpfr_mul_2si(eps.get(), eps.get(), -static_cast<long>(bits) + 1, MPFR_RNDN);
  if (!detail::hqr(a, wr, wi, max_its, eps)) {
    throw Error(ErrorKind::kConvergenceFailure, "high-precision QR iteration cap exceeded");
  }
  ScaledSpectrum out(wr.size());
  BigFloat mod, arg;
  for (std::size_t i = 0; i < wr.size(); ++i) {
    mpfr_hypot(mod.get(), wr[i].get(), wi[i].get(), MPFR_RNDN);
    if (mod.is_zero()) {
      out[i] = {-std::numeric_limits<double>::infinity(), 0.0, true};
      continue;
    }
    mpfr_log(mod.get(), mod.get(), MPFR_RNDN);
    mpfr_atan2(arg.get(), wi[i].get(), wr[i].get(), MPFR_RNDN);
    out[i] = {mod.to_double(), arg.to_double(), wi[i].is_zero()};
  }
  sort_by_modulus(out);
  return out;
}

}  // namespace

std::string ScaledEigenvalue::real_part_decimal() const {
  return decimal_from_log(log_abs, real_factor(*this));
}

std::string ScaledEigenvalue::imag_part_decimal() const {
  return decimal_from_log(log_abs, imag_factor(*this));
}

ScaledSpectrum to_scaled(const Spectrum& s) {
  ScaledSpectrum out;
  out.reserve(s.size());
  for (const auto& v : s) {
    const double mod = std::abs(v);
    out.push_back({mod == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(mod),
                   std::arg(v), v.imag() == 0.0});
  }
  return out;
}

ScaledSpectrum scale_spectrum(ScaledSpectrum s, double log_shift) {
  for (auto& v : s) v.log_abs += log_shift;
  return s;
}

void sort_by_modulus(ScaledSpectrum& s) {
  std::sort(s.begin(), s.end(), [](const ScaledEigenvalue& a, const ScaledEigenvalue& b) {
    if (a.log_abs != b.log_abs) return a.log_abs > b.log_abs;
    return std::sin(a.arg) > std::sin(b.arg);
  });
}

RealSimpleReport real_simple_report(const ScaledSpectrum& spectrum, double gap_tol) {
  ScaledSpectrum s = spectrum;
  sort_by_modulus(s);
  RealSimpleReport rep;
  rep.real_simple = true;
  for (const auto& v : s) {
    const double ratio = v.real ? 0.0 : std::abs(std::sin(v.arg));
    rep.max_imag_ratio = std::max(rep.max_imag_ratio, ratio);
    if (ratio > gap_tol) rep.real_simple = false;
  }
  rep.min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    const double gap = -std::expm1(s[i + 1].log_abs - s[i].log_abs);
    rep.gaps.push_back(gap);
    rep.min_gap = std::min(rep.min_gap, gap);
    if (!(gap > gap_tol)) rep.real_simple = false;
  }
  return rep;
}

double max_relative_mismatch(ScaledSpectrum a, ScaledSpectrum b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  sort_by_modulus(a);
  sort_by_modulus(b);
  const auto tied = [&](std::size_t i, std::size_t j) {
    return a[i].log_abs - a[j].log_abs <= 1e-6;
  };
  const auto dist = [&](std::size_t i, std::size_t j) {
    const double top = std::max(a[i].log_abs, b[j].log_abs);
    if (top == -std::numeric_limits<double>::infinity()) return 0.0;
    const auto za = std::polar(std::exp(a[i].log_abs - top), a[i].arg);
    const auto zb = std::polar(std::exp(b[j].log_abs - top), b[j].arg);
    return std::abs(za - zb);
  };
  return detail::grouped_pairing(a.size(), tied, dist);
}

int product_spectrum_precision(const Matrix& l, std::span<const DiagonalBlock> blocks,
                               std::int64_t n, const ProductSpectrumOptions& opts) {
  double hi = -std::numeric_limits<double>::infinity();
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& b : blocks) {
    hi = std::max(hi, std::log2(b.abs_value()));
    lo = std::min(lo, std::log2(b.abs_value()));
  }
  const double spread = blocks.empty() ? 0.0 : hi - lo;
  const double cond = condition_number(l);
  if (!std::isfinite(cond)) throw Error(ErrorKind::kSingular, "L is singular");
  const double bits = 64.0 + std::ceil(static_cast<double>(std::abs(n)) * spread) +
                      2.0 * std::ceil(std::log2(std::max(cond, 1.0))) +
                      16.0 * static_cast<double>(l.rows()) + opts.guard_bits;
  if (bits > 1e7) throw Error(ErrorKind::kOverflow, "required precision is impractical");
  return static_cast<int>(bits);
}

ScaledSpectrum product_spectrum(const Matrix& l, std::span<const DiagonalBlock> blocks,
                                std::int64_t n, const ProductSpectrumOptions& opts) {
  if (!l.is_square()) throw Error(ErrorKind::kSizeMismatch, "L not square");
  std::size_t dim = 0;
  for (const auto& b : blocks) dim += static_cast<std::size_t>(b.size);
  if (dim != l.rows()) throw Error(ErrorKind::kSizeMismatch, "blocks do not match L");
  l.require_finite("product_spectrum");
  const int bits = product_spectrum_precision(l, blocks, n, opts);
  detail::PrecisionGuard guard(bits);

  // T^n, block by block, entirely in MPFR: the angle n*theta is reduced from
  // the exact product, independently of the double routines.
  detail::SquareArray<BigFloat> t(dim);
  BigFloat two_pi;
  mpfr_const_pi(two_pi.get(), MPFR_RNDN);
  mpfr_mul_2ui(two_pi.get(), two_pi.get(), 1, MPFR_RNDN);
  std::size_t off = 0;
  for (const auto& b : blocks) {
    if (b.size == 1) {
      BigFloat v(b.lambda);
      mpfr_pow_si(v.get(), v.get(), static_cast<long>(n), MPFR_RNDN);
      t(off, off) = v;
    } else {
      BigFloat r(b.modulus);
      mpfr_pow_si(r.get(), r.get(), static_cast<long>(n), MPFR_RNDN);
      BigFloat ang(b.theta);
      mpfr_mul_si(ang.get(), ang.get(), static_cast<long>(n), MPFR_RNDN);
      mpfr_frac(ang.get(), ang.get(), MPFR_RNDN);
      ang *= two_pi;
      BigFloat s, c;
      mpfr_sin_cos(s.get(), c.get(), ang.get(), MPFR_RNDN);
      t(off, off) = r * c;
      t(off, off + 1) = -(r * s);
      t(off + 1, off) = r * s;
      t(off + 1, off + 1) = r * c;
    }
    off += static_cast<std::size_t>(b.size);
  }

  detail::SquareArray<BigFloat> prod(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    off = 0;
    for (const auto& b : blocks) {
      const auto sz = static_cast<std::size_t>(b.size);
      for (std::size_t c = off; c < off + sz; ++c) {
        BigFloat acc(0.0);
        for (std::size_t k = off; k < off + sz; ++k) acc += BigFloat(l(i, k)) * t(k, c);
        prod(i, c) = acc;
      }
      off += sz;
    }
  }
  detail::hessenberg(prod);
  return collect(prod, opts.max_iterations_per_value, bits);
}

ScaledSpectrum eigenvalues_high_precision(const Matrix& m, int bits) {
  if (!m.is_square()) throw Error(ErrorKind::kSizeMismatch, "matrix not square");
  m.require_finite("eigenvalues_high_precision");
  if (bits < 53) throw Error(ErrorKind::kInvalidArgument, "precision below 53 bits");
  detail::PrecisionGuard guard(bits);
  detail::SquareArray<BigFloat> a(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) a(i, j) = BigFloat(m(i, j));
  detail::hessenberg(a);
  return collect(a, 120, bits);
}

}  // namespace spectral_cascade
