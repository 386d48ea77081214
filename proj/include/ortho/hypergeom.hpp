#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ortho/complex.hpp"
#include "ortho/error.hpp"

namespace ortho {

// ---------------------------------------------------------------------------
// Series summation results
// ---------------------------------------------------------------------------

enum class SeriesStatus {
  Terminated,             // finite sum, exact
  ConvergedByTail,        // direct summation with a certified tail bound
  AcceleratedConverged,   // sequence-accelerated limit, estimated error
  FailedToConverge,
};

std::string series_status_label(SeriesStatus s);

struct SummationOptions {
  double tolerance = 1e-30;   // target bound on the truncation error
  long max_terms = 500000;    // budget for direct summation
  long accel_terms = 1600;    // budget per acceleration pass
  mpfr_prec_t max_precision_bits = 2048;  // escalation ceiling for acceleration
};

struct SeriesValue {
  Complex value;
  long terms_used = 0;
  Real tail_estimate;  // bound (direct) or estimate (accelerated) of the error
  SeriesStatus status = SeriesStatus::FailedToConverge;
  mpfr_prec_t precision_bits = 0;  // working precision that produced the value
};

// ---------------------------------------------------------------------------
// Hypergeometric-type series
// ---------------------------------------------------------------------------
//
//   S(t) = prefactor * t^prefactor_power *
//          sum_{k>=0} [prod_i (upper_i)_k / prod_j (lower_j)_k] (scale*t)^k / k!
//
// Both parameter lists may be empty (e.g. the exponential series has none).

struct HypSeries {
  std::vector<Complex> upper;
  std::vector<Complex> lower;
  Complex scale = Complex(1L);
  Complex prefactor = Complex(1L);
  long prefactor_power = 0;

  // Least m with some upper parameter equal to -m (m >= 0): the sum is then a
  // polynomial of degree m in (scale*t).
  std::optional<long> termination_degree() const;
  bool terminating() const { return termination_degree().has_value(); }
};

// (a)_k = a (a+1) ... (a+k-1), with (a)_0 = 1.
Complex shifted_factorial(const Complex& a, long k);

// sum(lower) - sum(upper): for series with upper.size() == lower.size() + 1
// this controls convergence at |scale*t| = 1 (needs positive real part).
Complex parametric_excess(const HypSeries& s);

// The k-th t-derivative as a series of the same kind: every parameter shifts
// by +k and the prefactor picks up scale^k * prod(upper)_k / prod(lower)_k.
// Requires prefactor_power == 0.
HypSeries derivative_series(const HypSeries& s, long k);

// First `count` Taylor coefficients of S(t) around t = 0 (prefactor and
// t^prefactor_power included).
std::vector<Complex> taylor_coefficients(const HypSeries& s, long count);

// Evaluates S(t), choosing a summation strategy from the series shape:
// exact finite sums for terminating series, direct summation with certified
// tail bounds where the terms decay fast enough, and Levin-type u-transform
// acceleration (with precision escalation up to opts.max_precision_bits) for
// slowly convergent unit-argument series.
SeriesValue eval_at(const HypSeries& s, const Complex& t, const SummationOptions& opts = {});

// Adaptive summation of a term sequence given by its first term and the exact
// term-to-term ratio:  term_{j0} = first,  term_{j+1} = term_j * ratio(j).
// Classifies the decay (terminating / geometric / slow) from the observed
// ratios and applies the same machinery as eval_at.
SeriesValue sum_adaptive(const Complex& first, long j0,
                         const std::function<Complex(long)>& ratio,
                         const SummationOptions& opts);

}  // namespace ortho
