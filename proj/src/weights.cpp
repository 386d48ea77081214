#include "ortho/weights.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ortho {

namespace {

// ---------------------------------------------------------------------------
// Cubic root candidates
// ---------------------------------------------------------------------------
//
// Roots of the monic cubic s^3 + c2 s^2 + c1 s + c0. Besides the Cardano
// roots (Newton-polished), multiplicity-aware candidates are appended: at a
// triple or double root Cardano only delivers O(2^(-P/3)) / O(2^(-P/2))
// accuracy, while the closed forms below are exact there.

Complex cubic_value(const Complex& c2, const Complex& c1, const Complex& c0, const Complex& s) {
  return ((s + c2) * s + c1) * s + c0;
}

Complex cubic_newton_polish(const Complex& c2, const Complex& c1, const Complex& c0, Complex s) {
  for (int it = 0; it < 3; ++it) {
    Complex f = cubic_value(c2, c1, c0, s);
    Complex df = (Real(3L) * s + Real(2L) * c2) * s + c1;
    if (approx_zero(df, max(Real(1L), abs(s) * abs(s)))) break;
    s = s - f / df;
  }
  return s;
}

Complex principal_cbrt(const Complex& w) {
  if (w.is_zero()) return Complex(0L);
  Real r = cbrt(abs(w));
  Real theta = arg(w) / Real(3L);
  return Complex(r * cos(theta), r * sin(theta));
}

std::vector<Complex> cubic_candidates(const Complex& c2, const Complex& c1, const Complex& c0) {
  std::vector<Complex> out;

  // Cardano on the depressed cubic w^3 + P w + Q, s = w - c2/3.
  Complex third = Complex(1L) / Real(3L);
  Complex shift = c2 * third;
  Complex P = c1 - c2 * c2 * third;
  Complex Q = (Real(2L) * c2 * c2 * c2 / Real(27L)) - c2 * c1 * third + c0;
  Complex D = (Q * Q / Real(4L)) + (P * P * P / Real(27L));
  Complex u = principal_cbrt(Complex(0L) - Q / Real(2L) + sqrt(D));
  Complex omega(Real("-0.5"), sqrt(Real(3L)) / Real(2L));
  for (int m = 0; m < 3; ++m) {
    Complex um = u;
    for (int i = 0; i < m; ++i) um *= omega;
    Complex w = um.is_zero() ? Complex(0L) : um - P / (Real(3L) * um);
    out.push_back(cubic_newton_polish(c2, c1, c0, w - shift));
  }

  // Triple-root candidate: s = -c2/3 (exact when the cubic is (s-u)^3).
  out.push_back(Complex(0L) - shift);

  // Double-root candidates: for (s-u)^2 (s-v),
  //   u = (c1 c2 - 9 c0) / (2 (3 c1 - c2^2)),  v = -c2 - 2u.
  Complex denom = Real(2L) * (Real(3L) * c1 - c2 * c2);
  if (!approx_zero(denom, max(Real(1L), max(abs(c1), abs(c2 * c2))))) {
    Complex udbl = (c1 * c2 - Real(9L) * c0) / denom;
    out.push_back(udbl);
    out.push_back(Complex(0L) - c2 - Real(2L) * udbl);
  }
  return out;
}

// Splits w^2 - s w + q into its two roots, stably.
std::pair<Complex, Complex> quadratic_roots(const Complex& s, const Complex& q) {
  Complex sq = sqrt(s * s - Real(4L) * q);
  Complex big = (abs(s + sq) >= abs(s - sq)) ? (s + sq) : (s - sq);
  Complex y1 = big / Real(2L);
  if (approx_zero(y1, max(Real(1L), abs(s)))) return {y1, s - y1};
  return {y1, q / y1};
}

// ---------------------------------------------------------------------------
// Certification: a candidate is accepted only if its closed-form f_0 matches
// the moment expansion  f_0(t) = sum_j m_j / v'_{j+1}(x_0) t^j.
// ---------------------------------------------------------------------------

constexpr long kCertifyCount = 12;

std::vector<Complex> direct_f0_coefficients(const FamilyContext& ctx, long count) {
  std::vector<Complex> c;
  c.reserve(static_cast<size_t>(count));
  for (long j = 0; j < count; ++j) c.push_back(ctx.moment(j) / ctx.v_prime(j, 0));
  return c;
}

struct CertifyOutcome {
  bool ok = false;
  Real residual;  // worst |closed - direct| seen
  std::string error;
};

CertifyOutcome certify(const CanonicalParams& cand, const std::vector<Complex>& direct) {
  CertifyOutcome rep;
  rep.residual = Real(0L);
  std::vector<Complex> closed;
  try {
    closed = taylor_coefficients(f0_series(cand), static_cast<long>(direct.size()));
  } catch (const Error& e) {
    rep.error = e.what();
    return rep;
  }
  bool ok = true;
  for (size_t j = 0; j < direct.size(); ++j) {
    rep.residual = max(rep.residual, abs(closed[j] - direct[j]));
    if (!approx_equal(closed[j], direct[j])) ok = false;
  }
  rep.ok = ok;
  return rep;
}

[[noreturn]] void certification_failure(const std::string& where, const Real& best_residual,
                                        const std::string& extra) {
  std::string msg = "no canonical-parameter candidate reproduces the moment expansion (" + where +
                    "; best residual " + to_decimal(best_residual, 8) + ")";
  if (!extra.empty()) msg += ": " + extra;
  throw CertificationError(msg);
}

}  // namespace

// ---------------------------------------------------------------------------
// canonicalize
// ---------------------------------------------------------------------------

CanonicalParams canonicalize(const FamilyContext& ctx) {
  const FamilyParams& fp = ctx.params();
  CanonicalParams canon;
  canon.case_id = ctx.lattice_case();
  std::vector<Complex> direct = direct_f0_coefficients(ctx, kCertifyCount);

  switch (canon.case_id) {
    case LatticeCase::Case1: {
      canon.p = fp.b1 / fp.b2 + Complex(1L);
      canon.r = fp.a1 / fp.a2 + Complex(1L);
      const Complex& p = canon.p;
      const Complex& r = canon.r;
      // With s = y1 + y2 and q = y1 y2 the parameter equations read
      //   A  := (d2/a2 + b0)/b2 = s(p+r-1-s) + q - r(p-1)
      //   R1 := (d1/a2 + (r-1) b0)/b2 - (r-1)(p-2) = (q - s + 1)(p+r-2-s)
      // eliminating q gives a monic cubic in s.
      Complex A = (fp.d2 / fp.a2 + fp.b0) / fp.b2;
      Complex R1 = (fp.d1 / fp.a2 + (r - Complex(1L)) * fp.b0) / fp.b2 -
                   (r - Complex(1L)) * (p - Complex(2L));
      Complex B = p + r - Complex(2L);
      Complex C0 = A + r * p - r + Complex(1L);
      Complex c2 = Complex(0L) - (B + p + r);
      Complex c1 = C0 + B * (p + r);
      Complex c0 = R1 - B * C0;

      Real best_residual = Real::inf();
      std::string last_error;
      for (const Complex& s : cubic_candidates(c2, c1, c0)) {
        Complex q = A + r * (p - Complex(1L)) - s * (p + r - Complex(1L) - s);
        auto [y1, y2] = quadratic_roots(s, q);
        CanonicalParams cand = canon;
        cand.y1 = y1;
        cand.y2 = y2;
        CertifyOutcome rep = certify(cand, direct);
        if (rep.ok) return cand;
        if (rep.error.empty() && rep.residual < best_residual) best_residual = rep.residual;
        if (!rep.error.empty()) last_error = rep.error;
      }
      certification_failure("case1 cubic", best_residual, last_error);
    }

    case LatticeCase::Case2: {
      canon.r = fp.a1 / fp.a2 + Complex(1L);
      const Complex& r = canon.r;
      Complex s = (fp.d2 / fp.a2 + fp.b0) / fp.b1 + r;
      Complex q = (fp.d1 / fp.a2 + fp.b0 * (r - Complex(1L))) / fp.b1 - (r - Complex(1L)) + s -
                  Complex(1L);
      auto [y1, y2] = quadratic_roots(s, q);
      canon.y1 = y1;
      canon.y2 = y2;
      CertifyOutcome rep = certify(canon, direct);
      if (!rep.ok) certification_failure("case2", rep.residual, rep.error);
      return canon;
    }

    case LatticeCase::Case3: {
      canon.p = fp.b1 / fp.b2 + Complex(1L);
      const Complex& p = canon.p;
      Complex s = p - Complex(1L) + fp.d2 / (fp.a1 * fp.b2);
      Complex q = (fp.d1 / fp.a1 + fp.b0) / fp.b2 - (p - Complex(2L)) + s - Complex(1L);
      auto [y1, y2] = quadratic_roots(s, q);
      canon.y1 = y1;
      canon.y2 = y2;
      CertifyOutcome rep = certify(canon, direct);
      if (!rep.ok) certification_failure("case3", rep.residual, rep.error);
      return canon;
    }

    case LatticeCase::Case4: {
      Complex a1b1 = fp.a1 * fp.b1;
      Complex den = a1b1 + fp.d2;
      Complex num = fp.a1 * fp.b0 + fp.d1 + fp.d2;
      if (approx_zero(den, max(Real(1L), max(abs(a1b1), abs(fp.d2))))) {
        // Degenerate z -> 0, y -> infinity with y*z = num/(a1 b1) finite:
        // f_0(t) = exp(lambda t).
        canon.exponential = true;
        canon.lambda = num / a1b1;
      } else {
        canon.y = num / den;
        canon.z = Complex(1L) + fp.d2 / a1b1;
      }
      CertifyOutcome rep = certify(canon, direct);
      if (!rep.ok) certification_failure("case4", rep.residual, rep.error);
      return canon;
    }
  }
  throw ParameterError("unclassifiable lattice case");
}

// ---------------------------------------------------------------------------
// Series builders
// ---------------------------------------------------------------------------

HypSeries f0_series(const CanonicalParams& canon) {
  HypSeries s;
  switch (canon.case_id) {
    case LatticeCase::Case1:
      s.upper = {canon.y1, canon.y2, canon.r + canon.p - canon.y1 - canon.y2 - Complex(1L)};
      s.lower = {canon.r, canon.p};
      break;
    case LatticeCase::Case2:
      s.upper = {canon.y1, canon.y2};
      s.lower = {canon.r};
      break;
    case LatticeCase::Case3:
      s.upper = {canon.y1, canon.y2};
      s.lower = {canon.p};
      break;
    case LatticeCase::Case4:
      if (canon.exponential) {
        s.scale = canon.lambda;  // sum (lambda t)^k / k! = exp(lambda t)
      } else {
        s.upper = {canon.y, Complex(1L)};
        s.lower = {Complex(1L)};
        s.scale = canon.z;
      }
      break;
  }
  return s;
}

namespace {

Real sign_pm(long k) { return (k % 2 == 0) ? Real(1L) : Real(-1L); }

// Shared tail of both f_k builders: attach (-1)^k t^k / k! and any extra factor.
HypSeries with_fk_prefactor(HypSeries s, long k, const Complex& extra) {
  s.prefactor *= extra * sign_pm(k) / factorial(static_cast<unsigned long>(k));
  s.prefactor_power = k;
  return s;
}

}  // namespace

HypSeries fk_series_explicit(const CanonicalParams& canon, long k) {
  if (k < 0) throw ParameterError("weight index must be nonnegative");
  Complex kk{Real(k)};
  HypSeries s;
  switch (canon.case_id) {
    case LatticeCase::Case1: {
      Complex y3 = canon.r + canon.p - canon.y1 - canon.y2 - Complex(1L);
      Complex denom = shifted_factorial(canon.r, k) *
                      shifted_factorial(canon.p - Complex(1L) + kk, k);
      if (denom.is_zero())
        throw ParameterError("weight series is singular: (r)_k (p-1+k)_k vanishes at k = " +
                             std::to_string(k));
      Complex numer = shifted_factorial(canon.y1, k) * shifted_factorial(canon.y2, k) *
                      shifted_factorial(y3, k);
      s.upper = {canon.y1 + kk, canon.y2 + kk, y3 + kk};
      s.lower = {canon.r + kk, canon.p + Real(2 * k)};
      return with_fk_prefactor(std::move(s), k, numer / denom);
    }
    case LatticeCase::Case2: {
      Complex denom = shifted_factorial(canon.r, k);
      if (denom.is_zero())
        throw ParameterError("weight series is singular: (r)_k vanishes at k = " +
                             std::to_string(k));
      Complex numer = shifted_factorial(canon.y1, k) * shifted_factorial(canon.y2, k);
      s.upper = {canon.y1 + kk, canon.y2 + kk};
      s.lower = {canon.r + kk};
      return with_fk_prefactor(std::move(s), k, numer / denom);
    }
    case LatticeCase::Case3: {
      Complex denom = shifted_factorial(canon.p - Complex(1L) + kk, k);
      if (denom.is_zero())
        throw ParameterError("weight series is singular: (p-1+k)_k vanishes at k = " +
                             std::to_string(k));
      Complex numer = shifted_factorial(canon.y1, k) * shifted_factorial(canon.y2, k);
      s.upper = {canon.y1 + kk, canon.y2 + kk};
      s.lower = {canon.p + Real(2 * k)};
      return with_fk_prefactor(std::move(s), k, numer / denom);
    }
    case LatticeCase::Case4: {
      return with_fk_prefactor(derivative_series(f0_series(canon), k), k, Complex(1L));
    }
  }
  throw ParameterError("unclassifiable lattice case");
}

HypSeries fk_series(const CanonicalParams& canon, long k) {
  if (k < 0) throw ParameterError("weight index must be nonnegative");
  Complex kk{Real(k)};
  switch (canon.case_id) {
    case LatticeCase::Case1:
    case LatticeCase::Case3: {
      // Derivative route: f_k = (-1)^k ((p+2k-1)/(p+k-1)) (t^k/k!) D^k Base,
      // where Base keeps the unshifted y's but lower parameter p+k.
      Complex ratio_den = canon.p + kk - Complex(1L);
      if (approx_zero(ratio_den, max(Real(1L), abs(canon.p) + Real(k))))
        return fk_series_explicit(canon, k);  // route pole: use the shifted form
      try {
        HypSeries base;
        if (canon.case_id == LatticeCase::Case1) {
          base.upper = {canon.y1, canon.y2,
                        canon.r + canon.p - canon.y1 - canon.y2 - Complex(1L)};
          base.lower = {canon.r, canon.p + kk};
        } else {
          base.upper = {canon.y1, canon.y2};
          base.lower = {canon.p + kk};
        }
        Complex ratio = (canon.p + Real(2 * k) - Complex(1L)) / ratio_den;
        return with_fk_prefactor(derivative_series(base, k), k, ratio);
      } catch (const ParameterError&) {
        return fk_series_explicit(canon, k);
      }
    }
    case LatticeCase::Case2:
    case LatticeCase::Case4: {
      // f_k = (-1)^k (t^k/k!) D^k f_0.
      try {
        return with_fk_prefactor(derivative_series(f0_series(canon), k), k, Complex(1L));
      } catch (const ParameterError&) {
        return fk_series_explicit(canon, k);
      }
    }
  }
  throw ParameterError("unclassifiable lattice case");
}

// ---------------------------------------------------------------------------
// Convergence preconditions
// ---------------------------------------------------------------------------

void require_convergence(const FamilyContext& ctx, const CanonicalParams& canon) {
  // Finite families evaluate as exact finite sums regardless of the excess.
  if (ctx.termination(512)) return;
  if (f0_series(canon).terminating()) return;

  switch (canon.case_id) {
    case LatticeCase::Case1:
      return;  // parametric excess is identically 1: always convergent
    case LatticeCase::Case2: {
      Complex excess = canon.r - canon.y1 - canon.y2;
      if (!(excess.re > Real(0L)))
        throw ConvergenceError(
            "weight series diverges: the convergence condition Re(r - y1 - y2) = "
            "Re(-(a2 b0 + d2)/(a2 b1)) > 0 fails (value " +
            to_decimal(excess.re, 8) + ")");
      return;
    }
    case LatticeCase::Case3: {
      Complex excess = canon.p - canon.y1 - canon.y2;
      if (!(excess.re > Real(0L)))
        throw ConvergenceError(
            "weight series diverges: the convergence condition Re(p - y1 - y2) = "
            "Re(1 - d2/(a1 b2)) > 0 fails (value " +
            to_decimal(excess.re, 8) + ")");
      return;
    }
    case LatticeCase::Case4: {
      if (canon.exponential) return;
      if (!(abs(canon.z) < Real(1L)))
        throw ConvergenceError(
            "weight series diverges: the convergence condition |z| = "
            "|1 + d2/(a1 b1)| < 1 fails (value " +
            to_decimal(abs(canon.z), 8) + "), and the series does not terminate");
      return;
    }
  }
}

// ---------------------------------------------------------------------------
// Weights
// ---------------------------------------------------------------------------

namespace {

// In case 2 the weight series is the k-th t-derivative of a series whose
// parametric excess is r - y1 - y2, and each derivative lowers the excess by
// one without shifting the lower parameter. The k-th weight series therefore
// converges at t = 1 only while Re(r - y1 - y2) > k; past that index the
// series diverges even though the k = 0 condition holds. (Cases 1 and 3 shift
// a lower parameter along with k, so their excess does not depend on k.)
void require_index_convergence(const FamilyContext& ctx, const CanonicalParams& canon, long k) {
  if (canon.case_id != LatticeCase::Case2 || k < 1) return;
  if (ctx.termination(512)) return;          // finite system: finite sums
  if (f0_series(canon).terminating()) return;  // terminating series: exact
  Complex excess = canon.r - canon.y1 - canon.y2;
  if (!(excess.re > Real(k)))
    throw ConvergenceError(
        "weight series diverges at index k = " + std::to_string(k) +
        ": each t-derivative lowers the parametric excess by one, so this weight "
        "requires Re(r - y1 - y2) > k, but Re(r - y1 - y2) = " +
        to_decimal(excess.re, 8));
}

// ---------------------------------------------------------------------------
// Stable evaluation of f_k(1) for non-terminating families
// ---------------------------------------------------------------------------
//
// The series built by fk_series converge at t = 1, but their terms keep
// growing until j ~ k^2/2 before the asymptotic decay sets in (the k-shifted
// upper parameters dominate the early terms), so a fixed summation budget
// samples only the growth regime once k is moderately large. The weights are
// therefore rerouted through classical unit-argument identities that express
// f_k(1) as an explicit multiple of f_0(1):
//
//   case 1 (Thomae transformation at the numerator parameter ya of largest
//   real part; {yb, yc} are the other two of {y1, y2, y3}):
//     f_k(1) = f_0(1) (-1)^k [(p-1+2k)/(p-1)] [yb yc / ((yb+k)(yc+k))]
//              [(p-1)_k / k!] T(k)/T(0),
//     T(k) = 3F2(r-ya, p-ya+k, 1; 1+yb+k, 1+yc+k; 1),
//   whose terms decay from the first one on (parametric excess ya + k).
//
//   case 2 (Gauss summation; exact while Re(r - y1 - y2) > k):
//     f_k(1) = f_0(1) (-1)^k (y1)_k (y2)_k / (k! (r-y1-y2-k)_k).
//
//   case 3 (Gauss summation; exact for every k):
//     f_k(1) = f_0(1) (-1)^k (y1)_k (y2)_k (p)_{2k}
//              / (k! (p-1+k)_k (p-y1)_k (p-y2)_k).
//
// Cases 2 and 3 need no series beyond f_0 itself; case 1 needs one rapidly
// convergent 3F2 per index plus the anchor T(0). Below kStableT1Start the
// derivative route is already safe for case 1 and keeps an extra independent
// code path exercised.

constexpr long kStableT1Start = 12;

struct StableT1 {
  bool case1 = false;
  Complex ya, yb, yc;  // case-1 split of the numerator triple, Re(ya) maximal
  Complex r0;          // f_0(1)
  SeriesValue r0_diag;
  Complex T0;          // case-1 anchor series T(0)
  SeriesValue T0_diag;
};

SeriesStatus worse_status(SeriesStatus a, SeriesStatus b) {
  auto rank = [](SeriesStatus s) {
    switch (s) {
      case SeriesStatus::Terminated: return 0;
      case SeriesStatus::ConvergedByTail: return 1;
      case SeriesStatus::AcceleratedConverged: return 2;
      case SeriesStatus::FailedToConverge: return 3;
    }
    return 3;
  };
  return rank(a) >= rank(b) ? a : b;
}

// Relative error contributed by one series factor of a product.
Real relative_tail(const SeriesValue& sv) {
  return sv.tail_estimate / max(abs(sv.value), Real::pow2(-4 * static_cast<long>(working_precision())));
}

// Round-off allowance for the closed-form factor arithmetic (a few dozen
// multiplications at working precision).
Real rounding_floor(const Complex& value) {
  return max(Real(1L), abs(value)) * Real::pow2(6 - static_cast<long>(working_precision()));
}

std::optional<StableT1> prepare_stable_t1(const CanonicalParams& canon,
                                          const SummationOptions& opts) {
  if (canon.case_id == LatticeCase::Case4) return std::nullopt;
  HypSeries f0 = f0_series(canon);
  if (f0.terminating()) return std::nullopt;  // finite sums need no reroute

  StableT1 st;
  st.r0_diag = eval_at(f0, Complex(1L), opts);
  st.r0 = st.r0_diag.value;
  if (st.r0_diag.status == SeriesStatus::FailedToConverge) return std::nullopt;
  if (canon.case_id != LatticeCase::Case1) return st;

  st.case1 = true;
  Complex y3 = canon.r + canon.p - canon.y1 - canon.y2 - Complex(1L);
  st.ya = canon.y1;
  st.yb = canon.y2;
  st.yc = y3;
  if (st.yb.re > st.ya.re) std::swap(st.ya, st.yb);
  if (st.yc.re > st.ya.re) std::swap(st.ya, st.yc);
  // T(0) has parametric excess ya; the anchor must itself converge.
  if (!(st.ya.re > Real(0L))) return std::nullopt;
  if (approx_zero(canon.p - Complex(1L), max(Real(1L), abs(canon.p)))) return std::nullopt;

  HypSeries t0;
  t0.upper = {canon.r - st.ya, canon.p - st.ya, Complex(1L)};
  t0.lower = {Complex(1L) + st.yb, Complex(1L) + st.yc};
  st.T0_diag = eval_at(t0, Complex(1L), opts);
  st.T0 = st.T0_diag.value;
  if (st.T0_diag.status == SeriesStatus::FailedToConverge) return std::nullopt;
  if (approx_zero(st.T0, Real(1L))) return std::nullopt;
  return st;
}

std::optional<std::pair<Complex, SeriesValue>> stable_t1_weight(const CanonicalParams& canon,
                                                                const StableT1& st, long k,
                                                                const SummationOptions& opts) {
  Complex kk{Real(k)};
  Real kfact = factorial(static_cast<unsigned long>(k));

  if (!st.case1) {
    Complex num =
        shifted_factorial(canon.y1, k) * shifted_factorial(canon.y2, k) * sign_pm(k);
    Complex den;
    if (canon.case_id == LatticeCase::Case2) {
      Complex e0 = canon.r - canon.y1 - canon.y2;
      den = kfact * shifted_factorial(e0 - kk, k);
    } else {
      num *= shifted_factorial(canon.p, 2 * k);
      den = kfact * shifted_factorial(canon.p - Complex(1L) + kk, k) *
            shifted_factorial(canon.p - canon.y1, k) *
            shifted_factorial(canon.p - canon.y2, k);
    }
    if (den.is_zero()) return std::nullopt;
    Complex value = st.r0 * num / den;
    SeriesValue sv;
    sv.value = value;
    sv.terms_used = st.r0_diag.terms_used;
    sv.status = st.r0_diag.status;
    sv.precision_bits = working_precision();
    sv.tail_estimate = abs(value) * relative_tail(st.r0_diag) + rounding_floor(value);
    return std::make_pair(value, sv);
  }

  Complex db = st.yb + kk;
  Complex dc = st.yc + kk;
  Real scale = max(Real(1L), max(abs(st.yb), abs(st.yc)) + Real(k));
  if (approx_zero(db, scale) || approx_zero(dc, scale)) return std::nullopt;
  Complex pm1 = canon.p - Complex(1L);
  Complex poch = shifted_factorial(pm1, k);
  if (poch.is_zero()) return std::nullopt;
  Complex ratio = (pm1 + Real(2 * k)) / pm1 * (st.yb * st.yc) / (db * dc) * poch / kfact *
                  sign_pm(k);

  HypSeries t;
  t.upper = {canon.r - st.ya, canon.p - st.ya + kk, Complex(1L)};
  t.lower = {Complex(1L) + st.yb + kk, Complex(1L) + st.yc + kk};
  SeriesValue tk = eval_at(t, Complex(1L), opts);
  if (tk.status == SeriesStatus::FailedToConverge) return std::nullopt;

  Complex value = st.r0 * ratio * tk.value / st.T0;
  SeriesValue sv;
  sv.value = value;
  sv.terms_used = st.r0_diag.terms_used + st.T0_diag.terms_used + tk.terms_used;
  sv.status = worse_status(worse_status(st.r0_diag.status, st.T0_diag.status), tk.status);
  sv.precision_bits =
      std::max({st.r0_diag.precision_bits, st.T0_diag.precision_bits, tk.precision_bits});
  sv.tail_estimate = abs(value) * (relative_tail(st.r0_diag) + relative_tail(st.T0_diag) +
                                   relative_tail(tk)) +
                     rounding_floor(value);
  return std::make_pair(value, sv);
}

bool stable_route_wanted(const CanonicalParams& canon, long k) {
  switch (canon.case_id) {
    case LatticeCase::Case1:
      return k >= kStableT1Start;
    case LatticeCase::Case2:
    case LatticeCase::Case3:
      return k >= 1;  // the closed forms are exact: use them from the start
    case LatticeCase::Case4:
      return false;
  }
  return false;
}

std::pair<Complex, SeriesValue> weight_routed(const FamilyContext& ctx,
                                              const CanonicalParams& canon, long k,
                                              const SummationOptions& opts,
                                              const std::optional<StableT1>& st) {
  require_index_convergence(ctx, canon, k);
  if (st && stable_route_wanted(canon, k))
    if (auto out = stable_t1_weight(canon, *st, k, opts)) return *out;
  HypSeries fk = fk_series(canon, k);
  SeriesValue sv = eval_at(fk, Complex(1L), opts);
  return {sv.value, sv};
}

}  // namespace

std::pair<Complex, SeriesValue> weight(const FamilyContext& ctx, const CanonicalParams& canon,
                                       long k, const SummationOptions& opts) {
  std::optional<StableT1> st;
  if (stable_route_wanted(canon, k)) st = prepare_stable_t1(canon, opts);
  return weight_routed(ctx, canon, k, opts, st);
}

WeightTable weight_table(const FamilyContext& ctx, long count, const SummationOptions& opts) {
  if (count < 1) throw ParameterError("weight table needs count >= 1");
  CanonicalParams canon = canonicalize(ctx);
  require_convergence(ctx, canon);

  WeightTable table;
  if (auto T = ctx.termination(count + 1)) {
    table.finite_family = *T - 1;
  } else if (auto deg = f0_series(canon).termination_degree()) {
    table.finite_family = *deg;
  }
  long effective = count;
  if (table.finite_family) effective = std::min(count, *table.finite_family + 1);

  std::optional<StableT1> st;
  if (stable_route_wanted(canon, effective - 1)) st = prepare_stable_t1(canon, opts);

  Complex total(0L);
  for (long k = 0; k < effective; ++k) {
    auto [w, sv] = weight_routed(ctx, canon, k, opts, st);
    total += w;
    table.entries.push_back(WeightEntry{k, ctx.x(k), w, std::move(sv)});
  }
  table.count = effective;
  table.sum_check = total;
  return table;
}

std::vector<Complex> weights_oracle(const FamilyContext& ctx, long J) {
  if (J < 0) throw ParameterError("weights oracle needs J >= 0");
  size_t n = static_cast<size_t>(J) + 1;
  // vk[j][k] = v_k(x_j) for k <= j.
  std::vector<std::vector<Complex>> vk(n);
  for (size_t j = 0; j < n; ++j) {
    vk[j].reserve(j + 1);
    vk[j].push_back(Complex(1L));
    Complex xj = ctx.x(static_cast<long>(j));
    for (size_t k = 1; k <= j; ++k) {
      Complex d = xj - ctx.x(static_cast<long>(k) - 1);
      vk[j].push_back(vk[j][k - 1] * d);
    }
  }
  for (size_t k = 0; k < n; ++k)
    if (approx_zero(vk[k][k], max(Real(1L), abs(ctx.x(static_cast<long>(k))))))
      throw NodeCollisionError("weights oracle: v_k(x_k) vanishes at k = " + std::to_string(k));

  // Back-substitute m_k = sum_{j>=k} v_k(x_j) r_j from the bottom row up.
  std::vector<Complex> r(n);
  for (long k = J; k >= 0; --k) {
    Complex acc = ctx.moment(k);
    for (long j = k + 1; j <= J; ++j)
      acc -= vk[static_cast<size_t>(j)][static_cast<size_t>(k)] * r[static_cast<size_t>(j)];
    r[static_cast<size_t>(k)] = acc / vk[static_cast<size_t>(k)][static_cast<size_t>(k)];
  }
  return r;
}

SeriesValue direct_series_weight(const FamilyContext& ctx, long k, const SummationOptions& opts) {
  if (k < 0) throw ParameterError("weight index must be nonnegative");
  // The context's caches are pinned to the precision it was built at, so
  // letting the summation engine escalate precision internally cannot refine
  // the terms the cached lattice data produces. Escalate out here instead,
  // rebuilding the lattice data from the parameters at every rung.
  mpfr_prec_t bits = working_precision();
  while (true) {
    PrecisionGuard guard(bits);
    std::optional<FamilyContext> rebuilt;
    const FamilyContext* use = &ctx;
    if (ctx.precision() != bits) {
      rebuilt.emplace(ctx.params());
      use = &*rebuilt;
    }
    Complex first = use->moment(k) / use->v_prime(k, k);
    Complex xk = use->x(k);
    auto ratio = [use, xk, k](long j) {
      Complex d = xk - use->x(j + 1);
      if (approx_zero(d, max(Real(1L), abs(xk))))
        throw NodeCollisionError("node collision: x_" + std::to_string(k) + " = x_" +
                                 std::to_string(j + 1));
      return use->g(j + 1) / use->h_diff(0, j + 1) / d;
    };
    SummationOptions rung = opts;
    rung.max_precision_bits = bits;  // inner escalation would reuse stale caches
    SeriesValue sv = sum_adaptive(first, k, ratio, rung);
    if (sv.status != SeriesStatus::FailedToConverge) return sv;
    if (bits >= opts.max_precision_bits) return sv;
    bits = std::min<mpfr_prec_t>(bits * 2, opts.max_precision_bits);
  }
}

}  // namespace ortho
