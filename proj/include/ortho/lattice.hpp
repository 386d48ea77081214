#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ortho/complex.hpp"
#include "ortho/error.hpp"

namespace ortho {

// ---------------------------------------------------------------------------
// Family parameters and lattice sequences
// ---------------------------------------------------------------------------
//
// A family is determined by seven complex parameters (a1, a2, b0, b1, b2,
// d1, d2) through three sequences over k = 0, 1, 2, ...:
//
//   nodes        x_k = b0 + b1 k + b2 k^2     (must be non-constant)
//   eigenvalues  h_k =      a1 k + a2 k^2     (h_0 = 0; must be non-constant)
//   inhomogeneity e_k =     d1 k + d2 k^2
//
// and the derived sequence  g_0 = 0,  g_k = x_{k-1} h_k + e_k  (k >= 1).

struct FamilyParams {
  Complex a1, a2;      // eigenvalue coefficients
  Complex b0, b1, b2;  // node coefficients
  Complex d1, d2;      // inhomogeneity coefficients

  Complex x_at(long k) const;
  Complex h_at(long k) const;
  Complex e_at(long k) const;
  Complex g_at(long k) const;  // g_0 == 0
};

// The four lattice shapes, by exact zero-tests on (a2, b2):
//   Case1: a2 != 0, b2 != 0   (quadratic eigenvalues, quadratic nodes)
//   Case2: a2 != 0, b2 == 0   (quadratic eigenvalues, linear nodes)
//   Case3: a2 == 0, b2 != 0   (linear eigenvalues, quadratic nodes)
//   Case4: a2 == 0, b2 == 0   (linear eigenvalues, linear nodes)
enum class LatticeCase { Case1 = 1, Case2 = 2, Case3 = 3, Case4 = 4 };

LatticeCase classify(const FamilyParams& p);
int case_number(LatticeCase c);
std::string case_label(LatticeCase c);

// ---------------------------------------------------------------------------
// Structural validation
// ---------------------------------------------------------------------------

struct ValidationReport {
  LatticeCase case_id = LatticeCase::Case4;

  bool x_nonconstant = false;  // b1, b2 not both zero
  bool h_nonconstant = false;  // a1, a2 not both zero

  bool h_distinct = false;  // h_0..h_horizon pairwise distinct
  bool x_distinct = false;  // x_0..x_horizon pairwise distinct

  // Least k >= 1 with g_k == 0; the family is then finite with N = k - 1.
  std::optional<long> terminating_at;

  // Least n in the quasi-definite range with alpha_n == 0, if any.
  std::optional<long> alpha_zero_at;

  std::vector<std::string> messages;

  // True when the family supports an orthogonal sequence on the scanned range.
  bool ok() const {
    return x_nonconstant && h_nonconstant && h_distinct && x_distinct &&
           !alpha_zero_at.has_value();
  }
};

// Scans structural requirements for indices up to `horizon` (inclusive).
ValidationReport validate(const FamilyParams& p, long horizon);

}  // namespace ortho
