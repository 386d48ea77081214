#include "ortho/lattice.hpp"

#include "ortho/connection.hpp"
#include "ortho/recurrence.hpp"

namespace ortho {

namespace {

Complex quadratic_at(const Complex& c0, const Complex& c1, const Complex& c2, long k) {
  Real kk(k);
  return c0 + kk * (c1 + kk * c2);
}

}  // namespace

Complex FamilyParams::x_at(long k) const { return quadratic_at(b0, b1, b2, k); }
Complex FamilyParams::h_at(long k) const { return quadratic_at(Complex(0L), a1, a2, k); }
Complex FamilyParams::e_at(long k) const { return quadratic_at(Complex(0L), d1, d2, k); }

Complex FamilyParams::g_at(long k) const {
  if (k <= 0) return Complex(0L);
  return x_at(k - 1) * h_at(k) + e_at(k);
}

LatticeCase classify(const FamilyParams& p) {
  bool hq = !p.a2.is_zero();
  bool xq = !p.b2.is_zero();
  if (hq && xq) return LatticeCase::Case1;
  if (hq) return LatticeCase::Case2;
  if (xq) return LatticeCase::Case3;
  return LatticeCase::Case4;
}

int case_number(LatticeCase c) { return static_cast<int>(c); }

std::string case_label(LatticeCase c) {
  switch (c) {
    case LatticeCase::Case1: return "case1";
    case LatticeCase::Case2: return "case2";
    case LatticeCase::Case3: return "case3";
    case LatticeCase::Case4: return "case4";
  }
  return "case?";
}

namespace {

// Does c1 + s*c2 vanish for some integer s in [1, smax]? Such an s makes the
// sequence c1*k + c2*k^2 collide at every index pair (k, j) with k + j = s.
std::optional<long> linear_integer_zero(const Complex& c1, const Complex& c2, long smax) {
  if (c2.is_zero()) return std::nullopt;
  Complex ratio = -(c1 / c2);
  if (!approx_zero(Complex(ratio.im), abs(ratio.re) + Real(1L))) return std::nullopt;
  Real s = round(ratio.re);
  if (!(s >= Real(1L)) || !(s <= Real(smax))) return std::nullopt;
  long si = s.round_to_long();
  if (approx_zero(c1 + Real(si) * c2, max(abs(c1), abs(Real(si) * c2)) + Real(1L))) return si;
  return std::nullopt;
}

}  // namespace

ValidationReport validate(const FamilyParams& p, long horizon) {
  ValidationReport rep;
  rep.case_id = classify(p);
  rep.x_nonconstant = !(p.b1.is_zero() && p.b2.is_zero());
  rep.h_nonconstant = !(p.a1.is_zero() && p.a2.is_zero());
  if (!rep.x_nonconstant) rep.messages.push_back("node sequence x_k is constant (b1 = b2 = 0)");
  if (!rep.h_nonconstant) rep.messages.push_back("eigenvalue sequence h_k is constant (a1 = a2 = 0)");
  if (!rep.x_nonconstant || !rep.h_nonconstant) return rep;

  // Pairwise distinctness of h_k (and x_k) on [0, horizon] reduces to checking
  // that a1 + s*a2 (resp. b1 + s*b2) has no zero at integer s = k + j.
  rep.h_distinct = true;
  if (auto s = linear_integer_zero(p.a1, p.a2, 2 * horizon - 1)) {
    rep.h_distinct = false;
    rep.messages.push_back("eigenvalue collision: h_k = h_j for k + j = " + std::to_string(*s));
  }

  rep.x_distinct = true;
  if (auto s = linear_integer_zero(p.b1, p.b2, 2 * horizon - 1)) {
    rep.x_distinct = false;
    rep.messages.push_back("node collision: x_k = x_j for k + j = " + std::to_string(*s));
  }

  FamilyContext ctx(p);

  if (auto T = ctx.termination(horizon)) {
    rep.terminating_at = *T;
    rep.messages.push_back("g_" + std::to_string(*T) +
                           " = 0: finite family with N = " + std::to_string(*T - 1));
  }

  // alpha_n must stay nonzero on the quasi-definite range (n <= N for finite
  // families); alpha_{N+1} = 0 is expected and not an error.
  long alpha_top = horizon;
  if (rep.terminating_at) alpha_top = std::min(alpha_top, *rep.terminating_at - 1);
  try {
    for (long n = 1; n <= alpha_top; ++n) {
      Complex a = alpha(ctx, n);
      if (approx_zero(a, abs(ctx.x(n)) + Real(1L))) {
        rep.alpha_zero_at = n;
        rep.messages.push_back("alpha_" + std::to_string(n) +
                               " = 0: the sequence is not quasi-definite at degree " +
                               std::to_string(n));
        break;
      }
    }
  } catch (const Error& e) {
    rep.alpha_zero_at = -1;
    rep.messages.push_back(std::string("recurrence coefficients unavailable: ") + e.what());
  }

  return rep;
}

}  // namespace ortho
