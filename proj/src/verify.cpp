#include "ortho/verify.hpp"

#include <algorithm>
#include <cmath>

namespace ortho {

namespace {

// Weight truncation error enters the verification sums amplified by
// |u_n(x_k) u_m(x_k)|, which grows rapidly with k. Request the weights far
// below the verification tolerance so their truncation cannot dominate the
// report (the exponent is clamped so the request stays a normal double).
SummationOptions tightened(const SummationOptions& opts) {
  SummationOptions t = opts;
  int e = std::max(16 - static_cast<int>(working_precision()), -1000);
  t.tolerance = std::min(opts.tolerance, std::ldexp(1.0, e));
  return t;
}

// Extrapolates the neglected tail from the magnitudes of the last few
// per-node contributions, fitting a power law |c_k| ~ C k^(-sigma) (weights
// can decay polynomially, so a geometric fit would be too optimistic):
//   sum_{k>K} C k^(-sigma) ~ c_K * K / (sigma - 1).
// Returns +inf when no usable decay is visible.
Real tail_from_decay(const std::vector<Real>& contrib) {
  long n = static_cast<long>(contrib.size());
  long window = std::min<long>(10, n / 2);
  if (window < 2) return Real::inf();
  long k_first = n - window;
  long k_last = n - 1;
  Real first = contrib[static_cast<size_t>(k_first)];
  Real last = contrib[static_cast<size_t>(k_last)];
  if (last.is_zero()) return Real(0L);
  if (first.is_zero() || !(last < first)) return Real::inf();
  Real sigma = (log(first) - log(last)) / (log(Real(k_last)) - log(Real(k_first)));
  if (!(sigma > Real("1.0001"))) return Real::inf();
  return last * Real(k_last) / (sigma - Real(1L));
}

}  // namespace

GramReport gram_matrix(const FamilyContext& ctx, long nmax, long K,
                       const SummationOptions& opts) {
  if (nmax < 0) throw ParameterError("gram matrix needs nmax >= 0");
  if (K < nmax + 1)
    throw ParameterError("gram matrix needs K >= nmax + 1 lattice nodes");

  WeightTable table = weight_table(ctx, K, tightened(opts));

  GramReport rep;
  rep.nmax = nmax;
  rep.K = table.count;
  rep.truncated = !(table.finite_family && table.count >= *table.finite_family + 1);

  size_t dim = static_cast<size_t>(nmax) + 1;
  // Accumulate with some headroom above the working precision.
  PrecisionGuard guard(working_precision() + 64);
  rep.gram.assign(dim, std::vector<Complex>(dim, Complex(0L)));

  std::vector<Real> contrib;  // per-node worst diagonal contribution magnitude
  contrib.reserve(static_cast<size_t>(table.count));
  for (const WeightEntry& entry : table.entries) {
    std::vector<Complex> u = u_eval_all(ctx, nmax, entry.node);
    Real worst_here(0L);
    for (size_t nidx = 0; nidx < dim; ++nidx) {
      for (size_t midx = 0; midx <= nidx; ++midx) {
        Complex term = u[nidx] * u[midx] * entry.weight;
        rep.gram[nidx][midx] += term;
        if (nidx == midx) worst_here = max(worst_here, abs(term));
      }
    }
    contrib.push_back(worst_here);
  }
  for (size_t nidx = 0; nidx < dim; ++nidx)
    for (size_t midx = nidx + 1; midx < dim; ++midx) rep.gram[nidx][midx] = rep.gram[midx][nidx];

  rep.norms.reserve(dim);
  for (long n = 0; n <= nmax; ++n) rep.norms.push_back(norm_K(ctx, n));

  rep.offdiag_max = Real(0L);
  rep.diag_rel_err = Real(0L);
  rep.diag_rel.reserve(dim);
  for (size_t nidx = 0; nidx < dim; ++nidx) {
    Real kn = abs(rep.norms[nidx]);
    for (size_t midx = 0; midx < dim; ++midx) {
      if (nidx == midx) continue;
      Real scale = sqrt(kn * abs(rep.norms[midx]));
      if (scale.is_zero()) scale = Real(1L);
      rep.offdiag_max = max(rep.offdiag_max, abs(rep.gram[nidx][midx]) / scale);
    }
    Real dn = kn.is_zero() ? abs(rep.gram[nidx][nidx])
                           : abs(rep.gram[nidx][nidx] - rep.norms[nidx]) / kn;
    rep.diag_rel.push_back(dn);
    rep.diag_rel_err = max(rep.diag_rel_err, dn);
  }

  if (rep.truncated) {
    // Express the extrapolated raw tail on the same (norm-relative) scale as
    // offdiag_max and diag_rel_err, conservatively against the smallest norm.
    Real norm_min = abs(rep.norms[0]);
    for (const Complex& kn : rep.norms) norm_min = min(norm_min, abs(kn));
    Real raw = tail_from_decay(contrib);
    rep.tail_allowance = norm_min.is_zero() ? raw : raw / min(norm_min, Real(1L));
  } else {
    rep.tail_allowance = Real(0L);
  }
  return rep;
}

MomentRecovery moment_recovery(const FamilyContext& ctx, long kmax, long K,
                               const SummationOptions& opts) {
  if (kmax < 0) throw ParameterError("moment recovery needs kmax >= 0");
  if (K < 1) throw ParameterError("moment recovery needs K >= 1");

  WeightTable table = weight_table(ctx, K, tightened(opts));

  MomentRecovery rep;
  rep.kmax = kmax;
  rep.K = table.count;

  size_t dim = static_cast<size_t>(kmax) + 1;
  PrecisionGuard guard(working_precision() + 64);
  std::vector<Complex> sums(dim, Complex(0L));
  for (const WeightEntry& entry : table.entries) {
    Complex v(1L);
    for (size_t k = 0; k < dim; ++k) {
      sums[k] += v * entry.weight;
      v *= entry.node - ctx.x(static_cast<long>(k));
    }
  }

  rep.worst = Real(0L);
  rep.rel_errors.reserve(dim);
  for (size_t k = 0; k < dim; ++k) {
    Complex mk = ctx.moment(static_cast<long>(k));
    Real err = abs(sums[k] - mk) / max(Real(1L), abs(mk));
    rep.rel_errors.push_back(err);
    rep.worst = max(rep.worst, err);
  }
  return rep;
}

}  // namespace ortho
