#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "ortho/connection.hpp"
#include "ortho/hypergeom.hpp"

namespace ortho {

// ---------------------------------------------------------------------------
// Canonical closed-form parameters for the weight generating functions
// ---------------------------------------------------------------------------
//
// Every family's f_0(t) = sum_j m_j / v'_{j+1}(x_0) t^j collapses to a closed
// hypergeometric form whose parameters depend on the lattice case:
//
//   Case1:  F(y1, y2, r+p-y1-y2-1; r, p; t)        with p = b1/b2 + 1,
//                                                       r = a1/a2 + 1
//   Case2:  F(y1, y2; r; t)                        with r = a1/a2 + 1
//   Case3:  F(y1, y2; p; t)                        with p = b1/b2 + 1
//   Case4:  F(y, 1; 1; z t)  =  (1 - z t)^(-y),    degenerating to
//           exp(lambda t) when a1 b1 + d2 = 0.
//
// The pair {y1, y2} is recovered from its symmetric functions s = y1+y2 and
// q = y1*y2 (in Case 1, s solves a cubic); every candidate is certified by
// matching the first 12 Taylor coefficients of the closed form against the
// moment expansion before it is accepted.

struct CanonicalParams {
  LatticeCase case_id = LatticeCase::Case4;
  Complex p, r, y1, y2;  // Cases 1-3 (Case2 leaves p unset, Case3 leaves r unset)
  Complex y, z;          // Case 4
  bool exponential = false;
  Complex lambda;        // Case 4 degenerate: f_0(t) = exp(lambda t)
};

CanonicalParams canonicalize(const FamilyContext& ctx);

// The closed form of f_0 as a summable series object.
HypSeries f0_series(const CanonicalParams& canon);

// f_k built by differentiation of the case's base form (the derivative route).
// Reroutes to the explicit shifted form when the route's denominator p+k-1
// vanishes; throws ParameterError if both forms are singular.
HypSeries fk_series(const CanonicalParams& canon, long k);

// f_k in the explicit shifted-parameter form (used for cross-validation and
// as the pole reroute target).
HypSeries fk_series_explicit(const CanonicalParams& canon, long k);

// Throws ConvergenceError (with the violated condition in the message) when
// the weights r_k = f_k(1) are divergent series for these parameters.
void require_convergence(const FamilyContext& ctx, const CanonicalParams& canon);

// ---------------------------------------------------------------------------
// Weights
// ---------------------------------------------------------------------------

struct WeightEntry {
  long k = 0;
  Complex node;    // x_k
  Complex weight;  // r_k = f_k(1)
  SeriesValue diagnostics;
};

struct WeightTable {
  std::vector<WeightEntry> entries;
  long count = 0;                     // number of entries
  std::optional<long> finite_family;  // N when the family is finite (members u_0..u_N)
  Complex sum_check;                  // sum of the computed weights (-> 1)
};

// r_k for one index; precondition: require_convergence passed.
std::pair<Complex, SeriesValue> weight(const FamilyContext& ctx, const CanonicalParams& canon,
                                       long k, const SummationOptions& opts = {});

// First `count` weights (capped at N+1 for finite families).
WeightTable weight_table(const FamilyContext& ctx, long count, const SummationOptions& opts = {});

// Independent oracle: solves the triangular moment system
//   m_k = sum_{j=k}^{J} v_k(x_j) r_j,  k = J..0
// by back-substitution, with no hypergeometric machinery involved.
std::vector<Complex> weights_oracle(const FamilyContext& ctx, long J);

// Second independent path: sums r_k = sum_{j>=k} m_j / v'_{j+1}(x_k) directly
// from its exact term ratios, never touching the canonical transforms.
SeriesValue direct_series_weight(const FamilyContext& ctx, long k,
                                 const SummationOptions& opts = {});

}  // namespace ortho
