#include <doctest.h>

#include "ortho/families.hpp"
#include "ortho/recurrence.hpp"
#include "test_util.hpp"

using namespace ortho;
using testutil::C;
using testutil::R;

TEST_CASE("charlier recurrence has beta_n = n + a, alpha_n = n a") {
  for (const char* astr : {"1", "2.5"}) {
    Real a = R(astr);
    auto spec = make_family("charlier", {{"a", Complex(a)}});
    FamilyContext ctx(spec.params);
    for (long n = 0; n <= 15; ++n)
      CHECK(testutil::drel(beta(ctx, n), Complex(Real(n) + a)) < 1e-70);
    for (long n = 1; n <= 15; ++n)
      CHECK(testutil::drel(alpha(ctx, n), Complex(Real(n) * a)) < 1e-70);
    // K_n = n! a^n
    CHECK(testutil::drel(norm_K(ctx, 0), C(1L)) == 0.0);
    CHECK(testutil::drel(norm_K(ctx, 5), Complex(factorial(5) * pow(a, 5L))) < 1e-69);
  }
}

TEST_CASE("meixner recurrence closed forms") {
  // beta_n = (n + (n + beta) c) / (1 - c),  alpha_n = n (n + beta - 1) c / (1 - c)^2.
  Real c = R("1") / R("3");
  Real b = R("2");
  auto spec = make_family("meixner", {{"c", Complex(c)}, {"beta", Complex(b)}});
  FamilyContext ctx(spec.params);
  Real omc = Real(1L) - c;
  for (long n = 0; n <= 12; ++n) {
    Real expect_beta = (Real(n) + (Real(n) + b) * c) / omc;
    CHECK(testutil::drel(beta(ctx, n), Complex(expect_beta)) < 1e-69);
  }
  for (long n = 1; n <= 12; ++n) {
    Real expect_alpha = Real(n) * (Real(n) + b - Real(1L)) * c / (omc * omc);
    CHECK(testutil::drel(alpha(ctx, n), Complex(expect_alpha)) < 1e-69);
  }
}

TEST_CASE("krawtchouk recurrence closed forms and termination zero") {
  // beta_n = n + p (N - 2n),  alpha_n = n p (1-p) (N - n + 1).
  Real p = R("0.3");
  const long N = 10;
  auto spec = make_family("krawtchouk", {{"p", Complex(p)}, {"N", C(N)}});
  FamilyContext ctx(spec.params);
  for (long n = 0; n <= N; ++n) {
    Real expect_beta = Real(n) + p * Real(N - 2 * n);
    CHECK(testutil::drel(beta(ctx, n), Complex(expect_beta)) < 1e-69);
  }
  for (long n = 1; n <= N; ++n) {
    Real expect_alpha = Real(n) * p * (Real(1L) - p) * Real(N - n + 1);
    CHECK(testutil::drel(alpha(ctx, n), Complex(expect_alpha)) < 1e-69);
  }
  // alpha_{N+1} carries the factor g_{N+1} = 0 and must vanish exactly.
  CHECK(alpha(ctx, N + 1).is_zero());
  CHECK(norm_K(ctx, N + 1).is_zero());
}

TEST_CASE("recurrence evaluation matches the newton expansion") {
  for (const FamilyParams& p : {testutil::generic_case1(), testutil::generic_case2(),
                                testutil::generic_case3()}) {
    FamilyContext ctx(p);
    for (long n = 0; n <= 8; ++n) {
      NewtonPoly poly = u_newton(ctx, n);
      REQUIRE(poly.degree() == n);
      for (const Complex& t : {C("1.3", "0"), C("-0.4", "0.9"), ctx.x(3)}) {
        Complex via_rec = u_eval(ctx, n, t);
        Complex via_newton = newton_eval(ctx.params(), poly, t);
        CHECK(testutil::drel(via_rec, via_newton) < 1e-60);
      }
    }
  }
}

TEST_CASE("u_eval_all agrees with individual evaluations") {
  FamilyContext ctx(testutil::generic_case1());
  Complex t = C("0.8", "-0.3");
  auto all = u_eval_all(ctx, 7, t);
  REQUIRE(all.size() == 8);
  for (long n = 0; n <= 7; ++n)
    CHECK(testutil::dgap(all[static_cast<size_t>(n)], u_eval(ctx, n, t)) == 0.0);
}

TEST_CASE("u_n is monic with the right leading structure") {
  // u_{n+1}(t) - (t - beta_n) u_n(t) + alpha_n u_{n-1}(t) = 0 pointwise.
  FamilyContext ctx(testutil::generic_case3());
  Complex t = C("2.2", "0.1");
  for (long n = 1; n <= 10; ++n) {
    Complex lhs = u_eval(ctx, n + 1, t) -
                  (t - beta(ctx, n)) * u_eval(ctx, n, t) +
                  alpha(ctx, n) * u_eval(ctx, n - 1, t);
    Real scale = max(abs(u_eval(ctx, n + 1, t)), Real(1L));
    CHECK(testutil::residual_zero(lhs, scale));
  }
}
