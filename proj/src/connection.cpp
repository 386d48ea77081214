#include "ortho/connection.hpp"

#include <string>

namespace ortho {

Complex v_eval(const FamilyParams& p, long k, const Complex& t) {
  Complex prod(1L);
  for (long i = 0; i < k; ++i) prod *= t - p.x_at(i);
  return prod;
}

Complex newton_eval(const FamilyParams& p, const NewtonPoly& poly, const Complex& t) {
  if (poly.coeffs.empty()) return Complex(0L);
  long n = poly.degree();
  Complex acc = poly.coeffs[static_cast<size_t>(n)];
  for (long k = n - 1; k >= 0; --k)
    acc = acc * (t - p.x_at(k)) + poly.coeffs[static_cast<size_t>(k)];
  return acc;
}

// ---------------------------------------------------------------------------
// FamilyContext
// ---------------------------------------------------------------------------

FamilyContext::FamilyContext(FamilyParams params)
    : p_(std::move(params)), case_(classify(p_)), prec_(working_precision()) {
  if (p_.b1.is_zero() && p_.b2.is_zero())
    throw ParameterError("node sequence x_k is constant (b1 = b2 = 0)");
  if (p_.a1.is_zero() && p_.a2.is_zero())
    throw ParameterError("eigenvalue sequence h_k is constant (a1 = a2 = 0)");
  xs_.push_back(p_.b0);
  hs_.push_back(Complex(0L));
  gs_.push_back(Complex(0L));
  g_zero_.push_back(true);
  ms_.push_back(Complex(1L));
}

Complex FamilyContext::x_locked(long k) const {
  extend_xh(k);
  return xs_[static_cast<size_t>(k)];
}

Complex FamilyContext::h_locked(long k) const {
  extend_xh(k);
  return hs_[static_cast<size_t>(k)];
}

void FamilyContext::extend_xh(long k) const {
  for (long i = static_cast<long>(xs_.size()); i <= k; ++i) {
    xs_.push_back(p_.x_at(i));
    hs_.push_back(p_.h_at(i));
  }
}

void FamilyContext::extend_g(long k) const {
  extend_xh(k);
  for (long i = static_cast<long>(gs_.size()); i <= k; ++i) {
    Complex prod = xs_[static_cast<size_t>(i - 1)] * hs_[static_cast<size_t>(i)];
    Complex e = p_.e_at(i);
    Complex gi = prod + e;
    // Effective-zero test against the magnitudes that formed g_i, so exact
    // terminating families register as terminating even with rounded inputs.
    Real scale = max(Real(1L), max(abs(prod), abs(e)));
    bool zero = approx_zero(gi, scale);
    if (zero) gi = Complex(0L);
    gs_.push_back(std::move(gi));
    g_zero_.push_back(zero);
  }
}

Complex FamilyContext::x(long k) const {
  if (k < 0) throw ParameterError("x_k needs k >= 0");
  std::lock_guard<std::mutex> lock(mu_);
  return x_locked(k);
}

Complex FamilyContext::h(long k) const {
  if (k < 0) throw ParameterError("h_k needs k >= 0");
  std::lock_guard<std::mutex> lock(mu_);
  return h_locked(k);
}

Complex FamilyContext::g(long k) const {
  if (k < 0) throw ParameterError("g_k needs k >= 0");
  std::lock_guard<std::mutex> lock(mu_);
  extend_g(k);
  return gs_[static_cast<size_t>(k)];
}

bool FamilyContext::g_is_zero(long k) const {
  if (k < 0) throw ParameterError("g_k needs k >= 0");
  std::lock_guard<std::mutex> lock(mu_);
  extend_g(k);
  return g_zero_[static_cast<size_t>(k)];
}

Complex FamilyContext::h_diff(long a, long b) const {
  std::lock_guard<std::mutex> lock(mu_);
  Complex ha = h_locked(a), hb = h_locked(b);
  Complex d = ha - hb;
  if (approx_zero(d, max(Real(1L), max(abs(ha), abs(hb)))))
    throw EigenvalueCollisionError("eigenvalue collision: h_" + std::to_string(a) + " = h_" +
                                   std::to_string(b));
  return d;
}

Complex FamilyContext::moment(long k) const {
  if (k < 0) throw ParameterError("m_k needs k >= 0");
  std::lock_guard<std::mutex> lock(mu_);
  extend_g(k);
  for (long i = static_cast<long>(ms_.size()); i <= k; ++i) {
    if (g_zero_[static_cast<size_t>(i)]) {
      ms_.push_back(Complex(0L));
      continue;
    }
    Complex hi = hs_[static_cast<size_t>(i)];
    if (approx_zero(hi, max(Real(1L), abs(hi))))
      throw EigenvalueCollisionError("eigenvalue collision: h_" + std::to_string(i) + " = h_0");
    // m_i = m_{i-1} * g_i / (h_0 - h_i), h_0 = 0.
    ms_.push_back(ms_[static_cast<size_t>(i - 1)] * gs_[static_cast<size_t>(i)] / (-hi));
  }
  return ms_[static_cast<size_t>(k)];
}

Complex FamilyContext::v_prime(long j, long k) const {
  if (k < 0 || j < k) throw ParameterError("v'_{j+1}(x_k) needs 0 <= k <= j");
  std::lock_guard<std::mutex> lock(mu_);
  extend_xh(j);
  auto& col = vp_[k];
  Complex xk = xs_[static_cast<size_t>(k)];
  if (col.empty()) {
    // Base entry j = k: prod_{i < k} (x_k - x_i).
    Complex base(1L);
    for (long i = 0; i < k; ++i) {
      Complex xi = xs_[static_cast<size_t>(i)];
      Complex d = xk - xi;
      if (approx_zero(d, max(Real(1L), max(abs(xk), abs(xi)))))
        throw NodeCollisionError("node collision: x_" + std::to_string(k) + " = x_" +
                                 std::to_string(i));
      base *= d;
    }
    col.push_back(std::move(base));
  }
  for (long jj = k + static_cast<long>(col.size()); jj <= j; ++jj) {
    extend_xh(jj);
    Complex xi = xs_[static_cast<size_t>(jj)];
    Complex d = xk - xi;
    if (approx_zero(d, max(Real(1L), max(abs(xk), abs(xi)))))
      throw NodeCollisionError("node collision: x_" + std::to_string(k) + " = x_" +
                               std::to_string(jj));
    col.push_back(col.back() * d);
  }
  return col[static_cast<size_t>(j - k)];
}

std::optional<long> FamilyContext::termination(long scan_up_to) const {
  std::lock_guard<std::mutex> lock(mu_);
  extend_g(scan_up_to);
  for (long k = 1; k <= scan_up_to; ++k)
    if (g_zero_[static_cast<size_t>(k)]) return k;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Connection coefficients
// ---------------------------------------------------------------------------

Complex connection_coeff(const FamilyContext& ctx, long n, long k) {
  if (n < 0 || k < 0 || k > n) throw ParameterError("connection coefficient needs 0 <= k <= n");
  Complex c(1L);
  for (long j = k; j < n; ++j) c *= ctx.g(j + 1) / ctx.h_diff(n, j);
  return c;
}

std::vector<Complex> connection_row(const FamilyContext& ctx, long n) {
  if (n < 0) throw ParameterError("connection row needs n >= 0");
  std::vector<Complex> row(static_cast<size_t>(n) + 1);
  row[static_cast<size_t>(n)] = Complex(1L);
  for (long k = n - 1; k >= 0; --k)
    row[static_cast<size_t>(k)] =
        row[static_cast<size_t>(k + 1)] * ctx.g(k + 1) / ctx.h_diff(n, k);
  return row;
}

Complex inverse_coeff(const FamilyContext& ctx, long n, long k) {
  if (n < 0 || k < 0 || k > n) throw ParameterError("inverse coefficient needs 0 <= k <= n");
  Complex c(1L);
  for (long j = k + 1; j <= n; ++j) c *= ctx.g(j) / ctx.h_diff(k, j);
  return c;
}

}  // namespace ortho
