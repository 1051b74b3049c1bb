#pragma once

// Minimal RAII wrapper over mpfr_t for the high-precision eigenvalue oracle.
// Precision of newly created values comes from a thread-local setting, so
// concurrent workers may use different precisions.

#include <mpfr.h>

#include <utility>

namespace spectral_cascade::detail {

class BigFloat {
 public:
  static mpfr_prec_t& default_precision() {
    thread_local mpfr_prec_t bits = 256;
    return bits;
  }

  BigFloat() {
    mpfr_init2(v_, default_precision());
    mpfr_set_zero(v_, 1);
  }
  BigFloat(double x) {  // NOLINT: implicit on purpose, mirrors double arithmetic
    mpfr_init2(v_, default_precision());
    mpfr_set_d(v_, x, MPFR_RNDN);
  }
  BigFloat(const BigFloat& o) {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  BigFloat(BigFloat&& o) noexcept {
    mpfr_init2(v_, MPFR_PREC_MIN);
    mpfr_swap(v_, o.v_);
  }
  BigFloat& operator=(const BigFloat& o) {
    if (this != &o) {
      mpfr_set_prec(v_, mpfr_get_prec(o.v_));
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  BigFloat& operator=(BigFloat&& o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
  }
  ~BigFloat() { mpfr_clear(v_); }

  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }

  BigFloat& operator+=(const BigFloat& o) {
    mpfr_add(v_, v_, o.v_, MPFR_RNDN);
    return *this;
  }
  BigFloat& operator-=(const BigFloat& o) {
    mpfr_sub(v_, v_, o.v_, MPFR_RNDN);
    return *this;
  }
  BigFloat& operator*=(const BigFloat& o) {
    mpfr_mul(v_, v_, o.v_, MPFR_RNDN);
    return *this;
  }
  BigFloat& operator/=(const BigFloat& o) {
    mpfr_div(v_, v_, o.v_, MPFR_RNDN);
    return *this;
  }

  friend BigFloat operator+(BigFloat a, const BigFloat& b) { return a += b; }
  friend BigFloat operator-(BigFloat a, const BigFloat& b) { return a -= b; }
  friend BigFloat operator*(BigFloat a, const BigFloat& b) { return a *= b; }
  friend BigFloat operator/(BigFloat a, const BigFloat& b) { return a /= b; }
  friend BigFloat operator-(BigFloat a) {
    mpfr_neg(a.v_, a.v_, MPFR_RNDN);
    return a;
  }

  friend bool operator==(const BigFloat& a, const BigFloat& b) { return mpfr_equal_p(a.v_, b.v_); }
  friend bool operator!=(const BigFloat& a, const BigFloat& b) { return !(a == b); }
  friend bool operator<(const BigFloat& a, const BigFloat& b) { return mpfr_less_p(a.v_, b.v_); }
  friend bool operator>(const BigFloat& a, const BigFloat& b) { return mpfr_greater_p(a.v_, b.v_); }
  friend bool operator<=(const BigFloat& a, const BigFloat& b) { return mpfr_lessequal_p(a.v_, b.v_); }
  friend bool operator>=(const BigFloat& a, const BigFloat& b) {
    return mpfr_greaterequal_p(a.v_, b.v_);
  }

  friend BigFloat abs(BigFloat a) {
    mpfr_abs(a.v_, a.v_, MPFR_RNDN);
    return a;
  }
  friend BigFloat sqrt(BigFloat a) {
    mpfr_sqrt(a.v_, a.v_, MPFR_RNDN);
    return a;
  }

 private:
  mpfr_t v_;
};

/// Sets the thread's default precision for the lifetime of the guard.
class PrecisionGuard {
 public:
  explicit PrecisionGuard(mpfr_prec_t bits) : saved_(BigFloat::default_precision()) {
    BigFloat::default_precision() = bits;
  }
  ~PrecisionGuard() { BigFloat::default_precision() = saved_; }
  PrecisionGuard(const PrecisionGuard&) = delete;
  PrecisionGuard& operator=(const PrecisionGuard&) = delete;

 private:
  mpfr_prec_t saved_;
};

}  // namespace spectral_cascade::detail
