#include "ortho/recurrence.hpp"

namespace ortho {

Complex beta(const FamilyContext& ctx, long n) {
  if (n < 0) throw ParameterError("beta_n needs n >= 0");
  Complex b = ctx.x(n) + ctx.g(n + 1) / ctx.h_diff(n, n + 1);
  // The trailing term carries g_n; at n = 0 it carries g_0 = 0 and is dropped
  // so that h_{-1} is never formed.
  if (n >= 1 && !ctx.g_is_zero(n)) b -= ctx.g(n) / ctx.h_diff(n - 1, n);
  return b;
}

Complex alpha(const FamilyContext& ctx, long n) {
  if (n < 1) throw ParameterError("alpha_n needs n >= 1");
  if (ctx.g_is_zero(n)) return Complex(0L);  // the whole product carries g_n
  Complex lead = ctx.g(n) / ctx.h_diff(n - 1, n);
  Complex bracket = ctx.x(n) - ctx.x(n - 1) - lead + ctx.g(n + 1) / ctx.h_diff(n - 1, n + 1);
  // The g_{n-1} term vanishes at n = 1 (g_0 = 0), keeping h_{-1} unformed.
  if (n >= 2 && !ctx.g_is_zero(n - 1)) bracket += ctx.g(n - 1) / ctx.h_diff(n - 2, n);
  return lead * bracket;
}

Complex norm_K(const FamilyContext& ctx, long n) {
  if (n < 0) throw ParameterError("K_n needs n >= 0");
  Complex k(1L);
  for (long i = 1; i <= n; ++i) k *= alpha(ctx, i);
  return k;
}

Complex u_eval(const FamilyContext& ctx, long n, const Complex& t) {
  if (n < 0) throw ParameterError("u_n needs n >= 0");
  Complex prev(1L);  // u_0
  if (n == 0) return prev;
  Complex cur = t - beta(ctx, 0);  // u_1
  for (long m = 1; m < n; ++m) {
    Complex next = (t - beta(ctx, m)) * cur - alpha(ctx, m) * prev;
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

std::vector<Complex> u_eval_all(const FamilyContext& ctx, long nmax, const Complex& t) {
  if (nmax < 0) throw ParameterError("u_n needs n >= 0");
  std::vector<Complex> us;
  us.reserve(static_cast<size_t>(nmax) + 1);
  us.push_back(Complex(1L));
  if (nmax == 0) return us;
  us.push_back(t - beta(ctx, 0));
  for (long m = 1; m < nmax; ++m)
    us.push_back((t - beta(ctx, m)) * us[static_cast<size_t>(m)] -
                 alpha(ctx, m) * us[static_cast<size_t>(m) - 1]);
  return us;
}

NewtonPoly u_newton(const FamilyContext& ctx, long n) {
  return NewtonPoly{connection_row(ctx, n)};
}

}  // namespace ortho
