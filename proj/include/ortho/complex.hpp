#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>

#include "ortho/real.hpp"

namespace ortho {

// ---------------------------------------------------------------------------
// Complex: arbitrary-precision complex value (a pair of Reals)
// ---------------------------------------------------------------------------

struct Complex {
  Real re;
  Real im;

  Complex() = default;
  Complex(const Real& r) : re(r) {}
  Complex(Real&& r) : re(std::move(r)) {}
  Complex(const Real& r, const Real& i) : re(r), im(i) {}
  Complex(long x) : re(x) {}
  Complex(int x) : re(static_cast<long>(x)) {}
  Complex(double x) : re(x) {}

  static Complex i() { return Complex(Real(0L), Real(1L)); }

  bool is_zero() const { return re.is_zero() && im.is_zero(); }
  bool is_finite() const { return re.is_finite() && im.is_finite(); }
  bool has_nan() const { return re.is_nan() || im.is_nan(); }
  mpfr_prec_t precision() const { return std::max(re.precision(), im.precision()); }
};

inline Complex operator+(const Complex& a, const Complex& b) {
  return Complex(a.re + b.re, a.im + b.im);
}
inline Complex operator-(const Complex& a, const Complex& b) {
  return Complex(a.re - b.re, a.im - b.im);
}
inline Complex operator-(const Complex& a) { return Complex(-a.re, -a.im); }

inline Complex operator*(const Complex& a, const Complex& b) {
  return Complex(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re);
}
inline Complex operator*(const Complex& a, const Real& b) {
  return Complex(a.re * b, a.im * b);
}
inline Complex operator*(const Real& a, const Complex& b) { return b * a; }

inline Complex operator/(const Complex& a, const Complex& b) {
  if (b.im.is_zero()) return Complex(a.re / b.re, a.im / b.re);
  Real d = b.re * b.re + b.im * b.im;
  return Complex((a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d);
}
inline Complex operator/(const Complex& a, const Real& b) {
  return Complex(a.re / b, a.im / b);
}

inline Complex& operator+=(Complex& a, const Complex& b) { a = a + b; return a; }
inline Complex& operator-=(Complex& a, const Complex& b) { a = a - b; return a; }
inline Complex& operator*=(Complex& a, const Complex& b) { a = a * b; return a; }
inline Complex& operator/=(Complex& a, const Complex& b) { a = a / b; return a; }

inline bool operator==(const Complex& a, const Complex& b) {
  return a.re == b.re && a.im == b.im;
}
inline bool operator!=(const Complex& a, const Complex& b) { return !(a == b); }

inline Complex conj(const Complex& z) { return Complex(z.re, -z.im); }
inline Real norm(const Complex& z) { return z.re * z.re + z.im * z.im; }
inline Real abs(const Complex& z) {
  if (z.im.is_zero()) return abs(z.re);
  return hypot(z.re, z.im);
}
inline Real arg(const Complex& z) { return atan2(z.im, z.re); }

// Principal branch square root.
inline Complex sqrt(const Complex& z) {
  if (z.im.is_zero()) {
    if (z.re.sign() >= 0) return Complex(sqrt(z.re), Real(0L));
    return Complex(Real(0L), sqrt(-z.re));
  }
  Real m = abs(z);
  Real u = sqrt(mul_pow2(m + abs(z.re), -1));
  if (z.re.sign() >= 0) return Complex(u, mul_pow2(z.im / u, -1));
  Real v = mul_pow2(abs(z.im) / u, -1);
  return z.im.sign() >= 0 ? Complex(v, u) : Complex(v, -u);
}

inline Complex exp(const Complex& z) {
  Real m = exp(z.re);
  if (z.im.is_zero()) return Complex(m, Real(0L));
  return Complex(m * cos(z.im), m * sin(z.im));
}

inline Complex pow(const Complex& z, long e) {
  if (e == 0) return Complex(1L);
  Complex base = e > 0 ? z : Complex(1L) / z;
  unsigned long n = e > 0 ? static_cast<unsigned long>(e) : 0UL - static_cast<unsigned long>(e);
  Complex acc(1L);
  while (n > 0) {
    if (n & 1UL) acc *= base;
    base *= base;
    n >>= 1;
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Approximate equality
// ---------------------------------------------------------------------------
//
// |a - b| <= max(2^(-P+8), 2^(-P/2) * max(|a|, |b|)) with P the smaller of the
// operand precisions: relative tolerance 2^(-P/2) with absolute floor 2^(-P+8).

inline Real equality_tolerance(mpfr_prec_t p, const Real& magnitude) {
  return max(Real::pow2(-static_cast<long>(p) + 8),
             Real::pow2(-static_cast<long>(p) / 2) * magnitude);
}

inline bool approx_equal(const Real& a, const Real& b) {
  if (a.is_nan() || b.is_nan()) return false;
  mpfr_prec_t p = std::min(a.precision(), b.precision());
  return abs(a - b) <= equality_tolerance(p, max(abs(a), abs(b)));
}

inline bool approx_equal(const Complex& a, const Complex& b) {
  if (a.has_nan() || b.has_nan()) return false;
  mpfr_prec_t p = std::min(a.precision(), b.precision());
  return abs(a - b) <= equality_tolerance(p, max(abs(a), abs(b)));
}

// Is z negligible against a natural scale for the computation that produced it?
inline bool approx_zero(const Complex& z, const Real& scale = Real(1L)) {
  if (z.has_nan()) return false;
  return abs(z) <= equality_tolerance(z.precision(), scale);
}

// ---------------------------------------------------------------------------
// Parsing and formatting
// ---------------------------------------------------------------------------

// Accepts "1.5", "-2e-3", "3+4i", "3-4i", "2i", "i", "-i", "1e-3+2.5e+1i".
inline Complex parse_complex(const std::string& input) {
  std::string s;
  for (char c : input)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  if (s.empty()) throw std::invalid_argument("Complex: empty literal");

  if (s.back() != 'i' && s.back() != 'I') return Complex(Real(s));

  s.pop_back();  // drop the trailing 'i'
  // Split at the last sign that does not follow an exponent marker.
  size_t split = std::string::npos;
  for (size_t k = 1; k < s.size(); ++k) {
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E')
      split = k;
  }
  auto unit_or_parse = [](const std::string& part) {
    if (part.empty() || part == "+") return Real(1L);
    if (part == "-") return Real(-1L);
    return Real(part);
  };
  if (split == std::string::npos) return Complex(Real(0L), unit_or_parse(s));
  return Complex(Real(s.substr(0, split)), unit_or_parse(s.substr(split)));
}

// Human-readable "a", "bi" or "a+bi" form (diagnostics, not serialization).
inline std::string format_complex(const Complex& z, int digits = 20) {
  if (z.im.is_zero()) return to_decimal(z.re, digits);
  std::string im = to_decimal(z.im, digits);
  if (z.re.is_zero()) return im + "i";
  std::string re = to_decimal(z.re, digits);
  return im[0] == '-' ? re + im + "i" : re + "+" + im + "i";
}

}  // namespace ortho
