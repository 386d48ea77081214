#pragma once

// Numerical verification of discrete orthogonality:
//
//   sum_k u_n(x_k) u_m(x_k) r_k  =  K_n delta_{nm},
//
// where the sum runs over the lattice nodes (all of them for a finite family,
// a truncation otherwise) and K_n = alpha_1 ... alpha_n.

#include <vector>

#include "ortho/recurrence.hpp"
#include "ortho/weights.hpp"

namespace ortho {

struct GramReport {
  long nmax = 0;  // highest polynomial degree tested
  long K = 0;     // number of lattice nodes actually summed
  bool truncated = false;                  // false when a finite family was fully covered
  std::vector<std::vector<Complex>> gram;  // gram[n][m] = sum_k u_n(x_k) u_m(x_k) r_k
  std::vector<Complex> norms;              // K_0..K_nmax from the recurrence
  std::vector<Real> diag_rel;              // per-degree |G_nn - K_n| / |K_n|
  Real offdiag_max;                        // max_{n != m} |G_nm| / sqrt(|K_n K_m|)
  Real diag_rel_err;                       // max of diag_rel
  Real tail_allowance;                     // estimated magnitude of the neglected tail,
                                           // on the same norm-relative scale
};

// Builds the (nmax+1) x (nmax+1) Gram matrix from K weight nodes and compares
// it against the recurrence norms. For an infinite lattice the truncation
// tail is estimated from the decay of the last few node contributions.
GramReport gram_matrix(const FamilyContext& ctx, long nmax, long K,
                       const SummationOptions& opts = {});

struct MomentRecovery {
  long kmax = 0;
  long K = 0;
  std::vector<Real> rel_errors;  // per-degree |sum_j v_k(x_j) r_j - m_k| / max(1, |m_k|)
  Real worst;
};

// Recovers the Newton-basis moments m_k = sum_j v_k(x_j) r_j from the weight
// table and reports the relative errors against the moment recursion.
MomentRecovery moment_recovery(const FamilyContext& ctx, long kmax, long K,
                               const SummationOptions& opts = {});

}  // namespace ortho
