#pragma once

#include <mpfr.h>

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>

namespace ortho {

// ---------------------------------------------------------------------------
// Working precision (per thread)
// ---------------------------------------------------------------------------

namespace detail {
inline thread_local mpfr_prec_t working_prec = 256;
}  // namespace detail

inline mpfr_prec_t working_precision() { return detail::working_prec; }

inline void set_working_precision(mpfr_prec_t bits) {
  detail::working_prec = std::max<mpfr_prec_t>(bits, MPFR_PREC_MIN);
}

// RAII scope that temporarily changes the thread's working precision.
class PrecisionGuard {
 public:
  explicit PrecisionGuard(mpfr_prec_t bits) : saved_(working_precision()) {
    set_working_precision(bits);
  }
  ~PrecisionGuard() { set_working_precision(saved_); }
  PrecisionGuard(const PrecisionGuard&) = delete;
  PrecisionGuard& operator=(const PrecisionGuard&) = delete;

 private:
  mpfr_prec_t saved_;
};

// ---------------------------------------------------------------------------
// Real: RAII arbitrary-precision floating point value
// ---------------------------------------------------------------------------
//
// Conventions:
//   * fresh values are created at the thread's working precision;
//   * copies keep the precision of their source;
//   * binary operations round to nearest at the max precision of the operands.

class Real {
 public:
  Real() {
    mpfr_init2(v_, working_precision());
    mpfr_set_zero(v_, 1);
  }
  Real(long x) {
    mpfr_init2(v_, working_precision());
    mpfr_set_si(v_, x, MPFR_RNDN);
  }
  Real(int x) : Real(static_cast<long>(x)) {}
  Real(unsigned long x) {
    mpfr_init2(v_, working_precision());
    mpfr_set_ui(v_, x, MPFR_RNDN);
  }
  Real(double x) {
    mpfr_init2(v_, working_precision());
    mpfr_set_d(v_, x, MPFR_RNDN);
  }

  // Parses a decimal literal (also accepts "inf"/"nan") at working precision.
  explicit Real(const std::string& s) {
    mpfr_init2(v_, working_precision());
    if (mpfr_set_str(v_, s.c_str(), 10, MPFR_RNDN) != 0) {
      mpfr_clear(v_);
      throw std::invalid_argument("Real: cannot parse decimal literal '" + s + "'");
    }
  }

  Real(const Real& o) {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  Real(Real&& o) noexcept {
    mpfr_init2(v_, MPFR_PREC_MIN);
    mpfr_swap(v_, o.v_);
  }
  Real& operator=(const Real& o) {
    if (this != &o) {
      mpfr_set_prec(v_, mpfr_get_prec(o.v_));
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  Real& operator=(Real&& o) noexcept {
    if (this != &o) mpfr_swap(v_, o.v_);
    return *this;
  }
  ~Real() { mpfr_clear(v_); }

  // A zero allocated at an explicit precision (used for op results).
  static Real with_precision(mpfr_prec_t bits) {
    Real r(raw_tag{}, std::max<mpfr_prec_t>(bits, MPFR_PREC_MIN));
    return r;
  }

  // 2^e, exact at working precision.
  static Real pow2(long e) {
    Real r;
    mpfr_set_ui_2exp(r.v_, 1, e, MPFR_RNDN);
    return r;
  }

  static Real nan() {
    Real r;
    mpfr_set_nan(r.v_);
    return r;
  }
  static Real inf(int sign = 1) {
    Real r;
    mpfr_set_inf(r.v_, sign);
    return r;
  }

  mpfr_prec_t precision() const { return mpfr_get_prec(v_); }
  mpfr_srcptr raw() const { return v_; }
  mpfr_ptr raw() { return v_; }

  explicit operator double() const { return mpfr_get_d(v_, MPFR_RNDN); }

  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  bool is_nan() const { return mpfr_nan_p(v_) != 0; }
  bool is_inf() const { return mpfr_inf_p(v_) != 0; }
  bool is_finite() const { return mpfr_number_p(v_) != 0; }
  bool is_integer() const { return mpfr_integer_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }

  // Nearest integer as a long (undefined for values out of long range).
  long round_to_long() const { return mpfr_get_si(v_, MPFR_RNDN); }

 private:
  struct raw_tag {};
  Real(raw_tag, mpfr_prec_t bits) {
    mpfr_init2(v_, bits);
    mpfr_set_zero(v_, 1);
  }

  mpfr_t v_;
};

// --- operator plumbing ------------------------------------------------------

namespace detail {

using mpfr_binop = int (*)(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t);
using mpfr_unop = int (*)(mpfr_ptr, mpfr_srcptr, mpfr_rnd_t);

inline Real binop(const Real& a, const Real& b, mpfr_binop f) {
  Real r = Real::with_precision(std::max(a.precision(), b.precision()));
  f(r.raw(), a.raw(), b.raw(), MPFR_RNDN);
  return r;
}

inline Real unop(const Real& a, mpfr_unop f) {
  Real r = Real::with_precision(a.precision());
  f(r.raw(), a.raw(), MPFR_RNDN);
  return r;
}

}  // namespace detail

inline Real operator+(const Real& a, const Real& b) { return detail::binop(a, b, mpfr_add); }
inline Real operator-(const Real& a, const Real& b) { return detail::binop(a, b, mpfr_sub); }
inline Real operator*(const Real& a, const Real& b) { return detail::binop(a, b, mpfr_mul); }
inline Real operator/(const Real& a, const Real& b) { return detail::binop(a, b, mpfr_div); }
inline Real operator-(const Real& a) { return detail::unop(a, mpfr_neg); }
inline Real& operator+=(Real& a, const Real& b) { a = a + b; return a; }
inline Real& operator-=(Real& a, const Real& b) { a = a - b; return a; }
inline Real& operator*=(Real& a, const Real& b) { a = a * b; return a; }
inline Real& operator/=(Real& a, const Real& b) { a = a / b; return a; }

inline bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.raw(), b.raw()) != 0; }
inline bool operator!=(const Real& a, const Real& b) { return !(a == b); }
inline bool operator<(const Real& a, const Real& b) { return mpfr_less_p(a.raw(), b.raw()) != 0; }
inline bool operator<=(const Real& a, const Real& b) { return mpfr_lessequal_p(a.raw(), b.raw()) != 0; }
inline bool operator>(const Real& a, const Real& b) { return mpfr_greater_p(a.raw(), b.raw()) != 0; }
inline bool operator>=(const Real& a, const Real& b) { return mpfr_greaterequal_p(a.raw(), b.raw()) != 0; }

inline Real abs(const Real& a) { return detail::unop(a, mpfr_abs); }
inline Real sqrt(const Real& a) { return detail::unop(a, mpfr_sqrt); }
inline Real exp(const Real& a) { return detail::unop(a, mpfr_exp); }
inline Real log(const Real& a) { return detail::unop(a, mpfr_log); }
inline Real sin(const Real& a) { return detail::unop(a, mpfr_sin); }
inline Real cos(const Real& a) { return detail::unop(a, mpfr_cos); }
inline Real atan2(const Real& y, const Real& x) { return detail::binop(y, x, mpfr_atan2); }
inline Real hypot(const Real& x, const Real& y) { return detail::binop(x, y, mpfr_hypot); }
inline Real pow(const Real& a, const Real& b) { return detail::binop(a, b, mpfr_pow); }
inline Real min(const Real& a, const Real& b) { return detail::binop(a, b, mpfr_min); }
inline Real max(const Real& a, const Real& b) { return detail::binop(a, b, mpfr_max); }

inline Real pow(const Real& a, long e) {
  Real r = Real::with_precision(a.precision());
  mpfr_pow_si(r.raw(), a.raw(), e, MPFR_RNDN);
  return r;
}

inline Real mul_pow2(const Real& a, long e) {
  Real r = Real::with_precision(a.precision());
  mpfr_mul_2si(r.raw(), a.raw(), e, MPFR_RNDN);
  return r;
}

inline Real cbrt(const Real& a) { return detail::unop(a, mpfr_cbrt); }

inline Real factorial(unsigned long n) {
  Real r;
  mpfr_fac_ui(r.raw(), n, MPFR_RNDN);
  return r;
}

inline Real floor(const Real& a) {
  Real r = Real::with_precision(a.precision());
  mpfr_floor(r.raw(), a.raw());
  return r;
}

inline Real round(const Real& a) {
  Real r = Real::with_precision(a.precision());
  mpfr_round(r.raw(), a.raw());
  return r;
}

// ---------------------------------------------------------------------------
// Decimal serialization
// ---------------------------------------------------------------------------

// Significant decimal digits that guarantee a bit-exact round trip at `bits`
// of binary precision: ceil(bits * 0.302) + 2.
inline int decimal_digits_for(mpfr_prec_t bits) {
  return static_cast<int>((static_cast<long>(bits) * 302 + 999) / 1000) + 2;
}

// Scientific-notation decimal string with `digits` significant digits.
inline std::string to_decimal(const Real& x, int digits) {
  digits = std::max(digits, 2);
  char* buf = nullptr;
  mpfr_asprintf(&buf, "%.*Re", digits - 1, x.raw());
  std::string s(buf);
  mpfr_free_str(buf);
  return s;
}

inline std::string to_decimal(const Real& x) {
  return to_decimal(x, decimal_digits_for(x.precision()));
}

}  // namespace ortho
