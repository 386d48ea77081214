#pragma once

// Shared helpers for the test suite. Numeric literals for non-dyadic values
// must go through Real(string) so that every path sees the same 256-bit
// rounding of the same decimal.

#include <string>

#include "ortho/complex.hpp"
#include "ortho/lattice.hpp"

namespace testutil {

using ortho::Complex;
using ortho::Real;

inline Real R(const std::string& s) { return Real(s); }
inline Complex C(const std::string& re, const std::string& im = "0") {
  return Complex(Real(re), Real(im));
}
inline Complex C(long re) { return Complex(re); }

inline double dmag(const Complex& z) { return static_cast<double>(ortho::abs(z)); }
inline double dgap(const Complex& a, const Complex& b) { return dmag(a - b); }

// |a - b| / max(1, |b|): relative against b with an absolute floor.
inline double drel(const Complex& a, const Complex& b) {
  double scale = std::max(1.0, dmag(b));
  return dgap(a, b) / scale;
}

// |a - b| / |b|: strict relative error (b must be nonzero).
inline double drel_strict(const Complex& a, const Complex& b) { return dgap(a, b) / dmag(b); }

// Scale-aware zero test for residuals of cancelling sums: the residual must
// sit far below the largest participating magnitude (2^-180 at 256 bits of
// working precision leaves ~70 bits of headroom for accumulated roundoff).
inline bool residual_zero(const Complex& sum, const Real& scale) {
  Real gate = max(Real(1L), scale) * Real::pow2(-180);
  return ortho::abs(sum) <= gate;
}

// --- raw lattice presets (one generic, non-classical preset per case) -------

inline ortho::FamilyParams generic_case1() {
  ortho::FamilyParams p;
  p.a1 = C("0.7");
  p.a2 = C(1L);
  p.b0 = C("0.3");
  p.b1 = C("0.9");
  p.b2 = C(1L);
  p.d1 = C("0.41");
  p.d2 = C("-0.23");
  return p;
}

inline ortho::FamilyParams generic_case2() {
  ortho::FamilyParams p;
  p.a1 = C("0.8");
  p.a2 = C(1L);
  p.b0 = C("0.2");
  p.b1 = C(1L);
  p.b2 = C(0L);
  p.d1 = C("0.3");
  p.d2 = C("-0.6");
  return p;
}

inline ortho::FamilyParams generic_case3() {
  ortho::FamilyParams p;
  p.a1 = C(1L);
  p.a2 = C(0L);
  p.b0 = C("-0.1");
  p.b1 = C("0.6");
  p.b2 = C(1L);
  p.d1 = C("0.25");
  p.d2 = C("-0.35");
  return p;
}

}  // namespace testutil
