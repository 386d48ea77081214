#pragma once

#include "ortho/connection.hpp"

namespace ortho {

// ---------------------------------------------------------------------------
// Three-term recurrence
// ---------------------------------------------------------------------------
//
//   u_0 = 1,  u_1(t) = t - beta_0,
//   u_{n+1}(t) = (t - beta_n) u_n(t) - alpha_n u_{n-1}(t).
//
// Any term carrying the factor g_0 = 0 is dropped before its denominator is
// formed, so h_{-1} is never evaluated (beta_0 and alpha_1).

// beta_n = x_n + g_{n+1}/(h_n - h_{n+1}) - g_n/(h_{n-1} - h_n),   n >= 0.
Complex beta(const FamilyContext& ctx, long n);

// alpha_n = g_n/(h_{n-1} - h_n) * [ g_{n-1}/(h_{n-2} - h_n)
//           - g_n/(h_{n-1} - h_n) + g_{n+1}/(h_{n-1} - h_{n+1})
//           + x_n - x_{n-1} ],                                     n >= 1.
Complex alpha(const FamilyContext& ctx, long n);

// K_n = alpha_1 * ... * alpha_n (K_0 = 1): the squared-norm scale of u_n.
Complex norm_K(const FamilyContext& ctx, long n);

// u_n evaluated at t by iterating the recurrence.
Complex u_eval(const FamilyContext& ctx, long n, const Complex& t);

// u_0(t)..u_nmax(t) in one sweep.
std::vector<Complex> u_eval_all(const FamilyContext& ctx, long nmax, const Complex& t);

// Newton-basis coefficients of u_n (the connection row c_{n,0..n}).
NewtonPoly u_newton(const FamilyContext& ctx, long n);

}  // namespace ortho
