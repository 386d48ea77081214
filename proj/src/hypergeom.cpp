#include "ortho/hypergeom.hpp"

#include <cmath>
#include <deque>

namespace ortho {

std::string series_status_label(SeriesStatus s) {
  switch (s) {
    case SeriesStatus::Terminated: return "terminated";
    case SeriesStatus::ConvergedByTail: return "converged_by_tail";
    case SeriesStatus::AcceleratedConverged: return "accelerated_converged";
    case SeriesStatus::FailedToConverge: return "failed_to_converge";
  }
  return "unknown";
}

namespace {

// a == -m for an integer m >= 0, within working tolerance?
std::optional<long> as_nonpositive_integer(const Complex& a) {
  if (!a.is_finite()) return std::nullopt;
  Real r = round(a.re);
  if (r > Real(0L) || abs(r) > Real(1000000000L)) return std::nullopt;
  long n = r.round_to_long();
  if (approx_equal(a, Complex(Real(n)))) return -n;
  return std::nullopt;
}

}  // namespace

std::optional<long> HypSeries::termination_degree() const {
  std::optional<long> deg;
  for (const auto& u : upper)
    if (auto m = as_nonpositive_integer(u))
      if (!deg || *m < *deg) deg = *m;
  return deg;
}

Complex shifted_factorial(const Complex& a, long k) {
  Complex prod(1L);
  for (long j = 0; j < k; ++j) prod *= a + Complex(Real(j));
  return prod;
}

Complex parametric_excess(const HypSeries& s) {
  Complex e(0L);
  for (const auto& l : s.lower) e += l;
  for (const auto& u : s.upper) e -= u;
  return e;
}

HypSeries derivative_series(const HypSeries& s, long k) {
  if (k < 0) throw ParameterError("derivative order must be nonnegative");
  if (s.prefactor_power != 0)
    throw ParameterError("derivative_series requires prefactor_power == 0");
  HypSeries d = s;
  if (k == 0) return d;
  Complex shift = pow(s.scale, k);
  for (auto& u : d.upper) {
    shift *= shifted_factorial(u, k);
    u += Complex(Real(k));
  }
  for (auto& l : d.lower) {
    Complex pl = shifted_factorial(l, k);
    if (pl.is_zero())
      throw ParameterError("derivative_series: lower parameter " + format_complex(l) +
                           " hits a pole within " + std::to_string(k) + " derivatives");
    shift /= pl;
    l += Complex(Real(k));
  }
  d.prefactor = s.prefactor * shift;
  return d;
}

std::vector<Complex> taylor_coefficients(const HypSeries& s, long count) {
  if (count < 0) throw ParameterError("coefficient count must be nonnegative");
  std::vector<Complex> coeffs(static_cast<size_t>(count), Complex(0L));
  if (s.prefactor.is_zero()) return coeffs;
  auto deg = s.termination_degree();
  Complex c = s.prefactor;
  long idx = s.prefactor_power;
  long k = 0;
  while (idx < count) {
    if (idx >= 0) coeffs[static_cast<size_t>(idx)] = c;
    if (deg && k >= *deg) break;
    // advance by the exact term ratio (without the t factor)
    Complex r = s.scale / Real(k + 1);
    for (const auto& u : s.upper) r *= u + Complex(Real(k));
    for (const auto& l : s.lower) {
      Complex lk = l + Complex(Real(k));
      if (lk.is_zero())
        throw ParameterError("lower parameter " + format_complex(l) +
                             " is a nonpositive integer reached by the expansion");
      r /= lk;
    }
    c *= r;
    ++idx;
    ++k;
  }
  return coeffs;
}

// ---------------------------------------------------------------------------
// Summation engine
// ---------------------------------------------------------------------------

namespace {

using RatioFn = std::function<Complex(long)>;

struct LoopState {
  Complex term{Complex(1L)};  // current term t_j
  Complex sum{Complex(1L)};   // partial sum through t_j
  long j = 0;                 // index of the current term
  long consumed = 1;          // terms accumulated so far
};

Real tol_target(const Real& tol, const Complex& sum) {
  return tol * max(Real(1L), abs(sum));
}

// Advances state by one term; returns false when the new term is exactly zero
// (the recursion then produces zeros forever: the sum terminated).
bool advance(LoopState& st, const RatioFn& ratio) {
  st.term *= ratio(st.j);
  st.j += 1;
  st.consumed += 1;
  if (st.term.is_zero()) return false;
  st.sum += st.term;
  return true;
}

void finish_terminated(const LoopState& st, SeriesValue& out) {
  out.value = st.sum;
  out.terms_used = st.consumed;
  out.tail_estimate = Real(0L);
  out.status = SeriesStatus::Terminated;
}

// Direct summation with a geometric tail certificate: once the recent term
// ratios stay below rho < 1, the remainder is bounded by |t_j| rho/(1-rho).
bool run_geometric(LoopState& st, const RatioFn& ratio, const Real& tol, long budget,
                   const Real& rho_floor, SeriesValue& out) {
  std::deque<Real> recent;
  Real inflate = Real(1L) + Real::pow2(-10);
  while (st.consumed < budget) {
    Complex r = ratio(st.j);
    Real rmag = abs(r);
    st.term *= r;
    st.j += 1;
    st.consumed += 1;
    if (st.term.is_zero()) {
      finish_terminated(st, out);
      return true;
    }
    st.sum += st.term;
    if (!st.term.is_finite() || !st.sum.is_finite()) return false;
    recent.push_back(rmag);
    if (recent.size() > 3) recent.pop_front();
    if (recent.size() < 3) continue;
    Real rho = rho_floor;
    for (const auto& q : recent) rho = max(rho, q);
    rho *= inflate;
    if (!(rho < Real("0.97"))) continue;
    Real tail = abs(st.term) * rho / (Real(1L) - rho);
    if (tail <= tol_target(tol, st.sum)) {
      out.value = st.sum;
      out.terms_used = st.consumed;
      out.tail_estimate = tail;
      out.status = SeriesStatus::ConvergedByTail;
      return true;
    }
  }
  return false;
}

// Direct summation for unit-argument series with parametric excess eps > 1:
// terms decay like j^(-1-eps) and once they decrease monotonically the
// remainder is bounded by |t_j| * j / eps.
bool run_polynomial(LoopState& st, const RatioFn& ratio, const Real& tol, long budget,
                    const Real& eps, SeriesValue& out) {
  double eps_d = static_cast<double>(eps);
  if (eps_d <= 1.0) return false;
  int monotone = 0;
  Real prev_mag = abs(st.term);
  long next_projection = 2048;
  while (st.consumed < budget) {
    if (!advance(st, ratio)) {
      finish_terminated(st, out);
      return true;
    }
    if (!st.term.is_finite() || !st.sum.is_finite()) return false;
    Real mag = abs(st.term);
    monotone = (mag <= prev_mag) ? monotone + 1 : 0;
    prev_mag = mag;
    if (monotone >= 3) {
      Real tail = mag * Real(st.j) / eps;
      Real target = tol_target(tol, st.sum);
      if (tail <= target) {
        out.value = st.sum;
        out.terms_used = st.consumed;
        out.tail_estimate = tail;
        out.status = SeriesStatus::ConvergedByTail;
        return true;
      }
      // The bound shrinks like j^(1-eps): project whether the budget suffices
      // and hand over to acceleration early when it cannot.
      if (st.consumed >= next_projection) {
        next_projection *= 2;
        double tail_d = static_cast<double>(tail);
        double target_d = static_cast<double>(target);
        if (tail_d > 0 && target_d > 0) {
          double factor = std::pow(tail_d / target_d, 1.0 / (eps_d - 1.0));
          if (static_cast<double>(st.j) * factor > static_cast<double>(budget)) return false;
        }
      }
    }
  }
  return false;
}

// Levin u-transform (beta = 1), fed terms one at a time; keeps the diagonal
// of the numerator/denominator tables in place.
class LevinU {
 public:
  // Feeds term a_n (n = 0, 1, ...) with partial sum s_n; returns the current
  // transform estimate when one is available.
  std::optional<Complex> feed(const Complex& s_n, const Complex& a_n) {
    long n = n_;
    n_ += 1;
    Complex omega = Real(n + 1) * a_n;  // omega_n = (beta + n) a_n
    if (omega.is_zero()) return std::nullopt;
    Complex d0 = Complex(1L) / omega;
    num_.push_back(s_n * d0);
    den_.push_back(d0);
    mag_num_.push_back(abs(num_.back()));
    mag_den_.push_back(abs(den_.back()));
    for (long j = n - 1; j >= 0; --j) {
      long k = n - j;  // transform order being formed at slot j
      // factor = (beta+j) (beta+j+k-1)^(k-2) / (beta+j+k)^(k-1), beta = 1
      Real fact = Real(j + 1) * pow(Real(j + k), k - 2) / pow(Real(j + k + 1), k - 1);
      size_t sj = static_cast<size_t>(j);
      num_[sj] = num_[sj + 1] - fact * num_[sj];
      den_[sj] = den_[sj + 1] - fact * den_[sj];
      // The same recurrences with magnitudes added instead of subtracted track
      // how much cancellation the table entries have absorbed.
      mag_num_[sj] = mag_num_[sj + 1] + fact * mag_num_[sj];
      mag_den_[sj] = mag_den_[sj + 1] + fact * mag_den_[sj];
    }
    const Complex& d = den_.front();
    if (d.is_zero() || !d.is_finite() || !num_.front().is_finite()) return std::nullopt;
    return num_.front() / d;
  }

  // First-order bound on the rounding noise in the current diagonal estimate:
  // the numerator and denominator are alternating combinations whose inputs
  // total mag_*, so cancellation amplifies unit rounding by mag/|result|. The
  // transform cannot be trusted below this level at the working precision, and
  // feeding further terms only raises it. Valid after a successful feed().
  Real noise_floor() const {
    Real dn = abs(den_.front());
    Real value = abs(num_.front()) / dn;
    return Real::pow2(8 - static_cast<int>(working_precision())) *
           (mag_num_.front() + value * mag_den_.front()) / dn;
  }

 private:
  long n_ = 0;
  std::vector<Complex> num_, den_;
  std::vector<Real> mag_num_, mag_den_;
};

// Accelerated summation of a tail whose first term (at index `first_j`) is
// `first`. On success out.value is the tail sum and out.terms_used the number
// of terms fed to the transform.
bool run_levin(const Complex& first, long first_j, const RatioFn& ratio, const Real& tol,
               long budget, SeriesValue& out) {
  LevinU levin;
  std::optional<Complex> prev, prev2;
  Complex term = first;
  long j = first_j;
  Complex partial(0L);
  long fed = 0;
  while (fed < budget) {
    partial += term;
    auto cur = levin.feed(partial, term);
    fed += 1;
    term *= ratio(j);
    j += 1;
    if (term.is_zero()) {
      // Exact termination while accelerating: the plain partial sum is exact.
      out.value = partial;
      out.terms_used = fed;
      out.tail_estimate = Real(0L);
      out.status = SeriesStatus::Terminated;
      return true;
    }
    if (!term.is_finite()) return false;
    if (cur) {
      if (fed >= 10) {
        Real target = tol_target(tol, *cur);
        // The noise floor only grows as further terms are fed, so once it
        // exceeds the target no deeper diagonal entry can be trusted to meet
        // it: stop now and let the caller escalate precision.
        Real noise = levin.noise_floor();
        if (noise > target) return false;
        if (prev && prev2) {
          Real d1 = abs(*cur - *prev);
          Real d2 = abs(*prev - *prev2);
          if (d1 <= target && d2 <= target) {
            out.value = *cur;
            out.terms_used = fed;
            out.tail_estimate = max(d1 + d2, noise);
            out.status = SeriesStatus::AcceleratedConverged;
            return true;
          }
        }
      }
      prev2 = prev;
      prev = cur;
    }
  }
  return false;
}

}  // namespace

// ---------------------------------------------------------------------------
// eval_at
// ---------------------------------------------------------------------------

SeriesValue eval_at(const HypSeries& s, const Complex& t, const SummationOptions& opts) {
  auto deg = s.termination_degree();
  for (const auto& l : s.lower) {
    if (auto m = as_nonpositive_integer(l)) {
      if (!deg || *deg > *m)
        throw ParameterError("lower parameter " + format_complex(l) +
                             " is a nonpositive integer: the series has a pole");
    }
  }

  SeriesValue out;
  out.precision_bits = working_precision();
  Real tol(opts.tolerance);

  Complex front = s.prefactor * pow(t, s.prefactor_power);
  if (front.is_zero()) {
    out.value = Complex(0L);
    out.terms_used = 0;
    out.tail_estimate = Real(0L);
    out.status = SeriesStatus::Terminated;
    return out;
  }

  Complex z = s.scale * t;
  auto ratio = [&s, z](long k) {
    Complex r = z / Real(k + 1);
    for (const auto& u : s.upper) r *= u + Complex(Real(k));
    for (const auto& l : s.lower) r /= l + Complex(Real(k));
    return r;
  };

  auto finish = [&front](SeriesValue bare) {
    bare.value = front * bare.value;
    bare.tail_estimate = abs(front) * bare.tail_estimate;
    return bare;
  };

  if (z.is_zero()) {
    out.value = front;
    out.terms_used = 1;
    out.tail_estimate = Real(0L);
    out.status = SeriesStatus::Terminated;
    return out;
  }

  if (deg) {
    LoopState st;
    for (long k = 0; k < *deg; ++k)
      if (!advance(st, ratio)) break;
    finish_terminated(st, out);
    return finish(std::move(out));
  }

  auto fail = [&](const LoopState* st) {
    out.value = Complex(Real::nan(), Real::nan());
    out.terms_used = st ? st->consumed : 0;
    out.tail_estimate = Real::inf();
    out.status = SeriesStatus::FailedToConverge;
    return out;
  };

  // Acceleration attempt with precision escalation (doubling up to the cap).
  auto accelerate = [&]() -> std::optional<SeriesValue> {
    mpfr_prec_t bits = working_precision();
    while (true) {
      PrecisionGuard guard(bits);
      SeriesValue sv;
      // Fresh accumulators are created at the escalated precision inside.
      if (run_levin(Complex(1L), 0, ratio, tol, opts.accel_terms, sv)) {
        sv.precision_bits = bits;
        return sv;
      }
      if (bits >= opts.max_precision_bits) return std::nullopt;
      bits = std::min<mpfr_prec_t>(bits * 2, opts.max_precision_bits);
    }
  };

  size_t p = s.upper.size(), q = s.lower.size();
  Real az = abs(z);

  if (p <= q || (p == q + 1 && az < Real(1L) - Real::pow2(-20))) {
    // Entire series, or inside the unit disc: direct summation converges.
    // Skip straight to acceleration when the geometric rate is too close to 1
    // for the budget.
    bool try_direct = true;
    if (p == q + 1) {
      double azd = static_cast<double>(az);
      double projected = std::log(opts.tolerance) / std::log(azd);
      if (!(projected < static_cast<double>(opts.max_terms))) try_direct = false;
    }
    LoopState st;
    if (try_direct) {
      Real rho_floor = (p == q + 1) ? az : Real(0L);
      if (run_geometric(st, ratio, tol, opts.max_terms, rho_floor, out)) return finish(std::move(out));
    }
    if (auto sv = accelerate()) return finish(std::move(*sv));
    return finish(fail(&st));
  }

  if (p == q + 1) {
    // |z| >= 1 - 2^-20 here.
    if (az > Real(1L) + Real::pow2(-20)) return finish(fail(nullptr));
    // Unit circle: convergence is governed by the parametric excess.
    Real eps = parametric_excess(s).re;
    if (!(eps > Real(0L))) return finish(fail(nullptr));
    if (eps > Real(2L)) {
      LoopState st;
      if (run_polynomial(st, ratio, tol, opts.max_terms, eps, out)) return finish(std::move(out));
    }
    if (auto sv = accelerate()) return finish(std::move(*sv));
    return finish(fail(nullptr));
  }

  // More upper than lower+1 parameters and z != 0: divergent.
  return finish(fail(nullptr));
}

// ---------------------------------------------------------------------------
// sum_adaptive
// ---------------------------------------------------------------------------

SeriesValue sum_adaptive(const Complex& first, long j0,
                         const std::function<Complex(long)>& ratio,
                         const SummationOptions& opts) {
  SeriesValue out;
  out.precision_bits = working_precision();
  Real tol(opts.tolerance);

  if (first.is_zero()) {
    // The recursion term_{j+1} = term_j * ratio(j) keeps the tail at zero.
    out.value = Complex(0L);
    out.terms_used = 1;
    out.tail_estimate = Real(0L);
    out.status = SeriesStatus::Terminated;
    return out;
  }

  LoopState st;
  st.term = first;
  st.sum = first;
  st.j = j0;

  // Probe until the term ratios stabilize below 1 in magnitude (ratios of
  // hypergeometric-type terms are rational in j, so they eventually stay on
  // one side of 1), watching for exact termination.
  const long probe_budget = std::max<long>(64, opts.max_terms / 2);
  std::deque<Real> window;
  long stable = 0;
  while (stable < 24 && st.consumed < probe_budget) {
    Complex r = ratio(st.j);
    Real rmag = abs(r);
    st.term *= r;
    st.j += 1;
    st.consumed += 1;
    if (st.term.is_zero()) {
      finish_terminated(st, out);
      return out;
    }
    st.sum += st.term;
    if (!st.sum.is_finite()) {
      out.value = st.sum;
      out.terms_used = st.consumed;
      out.tail_estimate = Real::inf();
      out.status = SeriesStatus::FailedToConverge;
      return out;
    }
    stable = (rmag < Real(1L)) ? stable + 1 : 0;
    window.push_back(rmag);
    if (window.size() > 16) window.pop_front();
  }

  if (stable >= 24) {
    Real wmax(0L);
    for (const auto& q : window) wmax = max(wmax, q);
    if (wmax <= Real("0.92")) {
      // Comfortably geometric so far: sum with the certified bound. The cap
      // keeps a mis-classified power-law tail (whose early ratios only look
      // geometric) from burning the whole budget before acceleration; any
      // genuinely certifiable geometric tail needs far fewer terms than this.
      long cap = std::min(opts.max_terms, st.consumed + 20000);
      LoopState at_probe = st;
      if (run_geometric(st, ratio, tol, cap, Real(0L), out)) return out;
      // Certification failed, so the tail was not geometric after all (the
      // ratios creep up toward 1). Rewind to the shallow head before handing
      // over: the transform models tails fed from small indices, and feeding
      // it from deep inside a power-law tail makes it converge quietly to a
      // wrong value. Only the consumed-terms count is kept.
      long spent = st.consumed;
      st = at_probe;
      st.consumed = spent;
    }
    // Slow (near-unit-ratio) decay, or a geometric attempt that ran out of
    // budget: screen out divergent/marginal tails before accelerating. For a
    // power-law tail |t_j| ~ j^-c the ratio satisfies |ratio(j)| ~ 1 - c/j, so
    // c_j = (1 - |ratio(j)|) j tends to c — but only slowly, and just past a
    // pre-asymptotic hump c_j can even be negative while the true c is > 1.
    // The ratio callback is a pure O(1) function of the index, so sample the
    // far field and cancel the O(1/J) drift by Richardson extrapolation.
    long far = std::max<long>(4 * (st.j + 1), 1024);
    auto c_at = [&ratio](long J) { return (Real(1L) - abs(ratio(J))) * Real(J); };
    Real c_inf = Real(2L) * c_at(2 * far) - c_at(far);
    // Same-sign tails need c > 1 (absolute convergence); sign-alternating
    // tails converge conditionally for any c > 0 and Levin handles them.
    bool alternating = ratio(far).re < Real(0L) && ratio(2 * far).re < Real(0L);
    if (c_inf > (alternating ? Real("0.02") : Real("1.02"))) {
      // The head through the current term is summed exactly; only the tail
      // beyond it goes through the transform.
      Complex head = st.sum;
      Complex tail_first = st.term * ratio(st.j);
      long spent = st.consumed;
      if (tail_first.is_zero()) {
        finish_terminated(st, out);
        return out;
      }
      mpfr_prec_t bits = working_precision();
      while (true) {
        PrecisionGuard guard(bits);
        SeriesValue attempt;
        if (run_levin(tail_first, st.j + 1, ratio, tol, opts.accel_terms, attempt)) {
          attempt.precision_bits = bits;
          attempt.value = head + attempt.value;
          attempt.terms_used += spent;
          out = std::move(attempt);
          return out;
        }
        if (bits >= opts.max_precision_bits) break;
        bits = std::min<mpfr_prec_t>(bits * 2, opts.max_precision_bits);
      }
    }
  }

  out.value = Complex(Real::nan(), Real::nan());
  out.terms_used = st.consumed;
  out.tail_estimate = Real::inf();
  out.status = SeriesStatus::FailedToConverge;
  return out;
}

}  // namespace ortho
