#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <vector>

#include "ortho/lattice.hpp"

namespace ortho {

// ---------------------------------------------------------------------------
// Newton basis
// ---------------------------------------------------------------------------
//
// v_0(t) = 1,  v_k(t) = (t - x_0)(t - x_1)...(t - x_{k-1}).

// A polynomial written in the Newton basis: sum_k coeffs[k] * v_k(t).
struct NewtonPoly {
  std::vector<Complex> coeffs;
  long degree() const { return static_cast<long>(coeffs.size()) - 1; }
};

Complex v_eval(const FamilyParams& p, long k, const Complex& t);
Complex newton_eval(const FamilyParams& p, const NewtonPoly& poly, const Complex& t);

// ---------------------------------------------------------------------------
// FamilyContext: shared caches for one parameter set
// ---------------------------------------------------------------------------
//
// Caches the lattice sequences, generalized moments and Newton-derivative
// products that every higher-level computation keeps re-using. All accessors
// are const and thread-safe (append-only caches behind a mutex); caches are
// tied to the working precision at construction time, so to recompute at a
// different precision build a new context inside a PrecisionGuard.

class FamilyContext {
 public:
  explicit FamilyContext(FamilyParams params);

  const FamilyParams& params() const { return p_; }
  LatticeCase lattice_case() const { return case_; }
  mpfr_prec_t precision() const { return prec_; }

  Complex x(long k) const;
  Complex h(long k) const;
  Complex g(long k) const;

  // True when g_k is an exact/effective zero against its formation scale.
  bool g_is_zero(long k) const;

  // h_a - h_b; throws EigenvalueCollisionError when the difference vanishes.
  Complex h_diff(long a, long b) const;

  // Generalized moment m_k (m_0 = 1), via the order-one recurrence
  //   m_k = m_{k-1} * g_k / (h_0 - h_k).
  Complex moment(long k) const;

  // v'_{j+1}(x_k) = prod_{0 <= i <= j, i != k} (x_k - x_i), for 0 <= k <= j.
  // Throws NodeCollisionError when two participating nodes coincide.
  Complex v_prime(long j, long k) const;

  // Least T in [1, scan_up_to] with g_T == 0, if any: the family is then
  // finite with members u_0..u_{T-1}.
  std::optional<long> termination(long scan_up_to) const;

 private:
  void extend_xh(long k) const;          // callers hold mu_
  void extend_g(long k) const;           // callers hold mu_
  Complex x_locked(long k) const;        // callers hold mu_
  Complex h_locked(long k) const;        // callers hold mu_

  FamilyParams p_;
  LatticeCase case_;
  mpfr_prec_t prec_;

  mutable std::mutex mu_;
  mutable std::vector<Complex> xs_, hs_, gs_, ms_;
  mutable std::vector<bool> g_zero_;
  mutable std::map<long, std::vector<Complex>> vp_;  // node k -> v'_{j+1}(x_k), j = k, k+1, ...
};

// ---------------------------------------------------------------------------
// Connection coefficients
// ---------------------------------------------------------------------------
//
// u_n = sum_k c_{n,k} v_k with
//   c_{n,n} = 1,  c_{n,k} = prod_{j=k}^{n-1} g_{j+1} / (h_n - h_j),
// and the inverse expansion v_n = sum_k chat_{n,k} u_k with
//   chat_{n,n} = 1,  chat_{n,k} = prod_{j=k+1}^{n} g_j / (h_k - h_j).

Complex connection_coeff(const FamilyContext& ctx, long n, long k);
std::vector<Complex> connection_row(const FamilyContext& ctx, long n);
Complex inverse_coeff(const FamilyContext& ctx, long n, long k);

}  // namespace ortho
