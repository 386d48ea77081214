#include <doctest.h>

#include <vector>

#include "ortho/connection.hpp"
#include "ortho/families.hpp"
#include "test_util.hpp"

using namespace ortho;
using testutil::C;
using testutil::R;

namespace {

FamilyParams wilson_params() {
  return make_family("wilson", {{"a", R("0.5")}, {"b", R("0.6")},
                                {"c", R("0.7")}, {"d", R("0.8")}})
      .params;
}

FamilyContext wilson_ctx() { return FamilyContext(wilson_params()); }

}  // namespace

TEST_CASE("context rejects constant sequences") {
  FamilyParams p;  // all zero
  CHECK_THROWS_AS(FamilyContext{p}, ParameterError);
  FamilyParams q;
  q.a1 = C(1L);  // x still constant
  CHECK_THROWS_AS(FamilyContext{q}, ParameterError);
}

TEST_CASE("newton basis evaluation") {
  FamilyParams p = testutil::generic_case1();
  // v_3(t) = (t - x_0)(t - x_1)(t - x_2)
  Complex t = C("1.25", "0.5");
  Complex direct = (t - p.x_at(0)) * (t - p.x_at(1)) * (t - p.x_at(2));
  CHECK(testutil::dgap(v_eval(p, 3, t), direct) < 1e-70);
  CHECK(v_eval(p, 0, t) == Complex(1L));

  NewtonPoly poly;
  poly.coeffs = {C(2L), C("-1"), C("0.5")};
  Complex expect = C(2L) - v_eval(p, 1, t) + C("0.5") * v_eval(p, 2, t);
  CHECK(testutil::dgap(newton_eval(p, poly, t), expect) < 1e-69);
}

TEST_CASE("charlier moments are identically one") {
  // g_k = -k and h_0 - h_k = -k, so m_k = m_{k-1} * (-k)/(-k) = 1.
  auto spec = make_family("charlier", {{"a", C(1L)}});
  FamilyContext ctx(spec.params);
  for (long k = 0; k <= 40; ++k) CHECK(testutil::dgap(ctx.moment(k), C(1L)) < 1e-70);
}

TEST_CASE("krawtchouk moments match the falling-factorial product") {
  // g_k = p k (k - N - 1), h_k = k  ->  m_k = p^k * N (N-1) ... (N-k+1).
  auto spec = make_family("krawtchouk", {{"p", R("0.3")}, {"N", C(10L)}});
  FamilyContext ctx(spec.params);
  Complex expect(1L);
  for (long k = 1; k <= 12; ++k) {
    expect *= R("0.3") * Real(10 - (k - 1));
    CHECK(testutil::drel(ctx.moment(k), expect) < 1e-70);
  }
}

TEST_CASE("v_prime matches the direct product") {
  FamilyContext ctx = wilson_ctx();
  for (long j = 0; j <= 6; ++j) {
    for (long k = 0; k <= j; ++k) {
      Complex prod(1L);
      for (long i = 0; i <= j; ++i)
        if (i != k) prod *= ctx.x(k) - ctx.x(i);
      CHECK(testutil::drel(ctx.v_prime(j, k), prod) < 1e-70);
    }
  }
}

TEST_CASE("collisions raise typed errors") {
  // x_k = k^2 - 2k has x_0 = x_2; keep h strictly increasing.
  FamilyParams q;
  q.a1 = C(1L);
  q.b1 = C(-2L);
  q.b2 = C(1L);
  q.d1 = C(1L);
  q.d2 = C(1L);
  FamilyContext ctx(q);
  CHECK_THROWS_AS(ctx.v_prime(2, 0), NodeCollisionError);

  // h_k = k - k^2/4 has h_1 = h_3.
  FamilyParams p;
  p.a1 = C(1L);
  p.a2 = C("-0.25");
  p.b1 = C(1L);
  p.d1 = C(1L);
  FamilyContext hctx(p);
  CHECK_THROWS_AS(hctx.h_diff(1, 3), EigenvalueCollisionError);
}

TEST_CASE("termination scan") {
  auto kraw = make_family("krawtchouk", {{"p", R("0.5")}, {"N", C(2L)}});
  FamilyContext ctx(kraw.params);
  auto T = ctx.termination(50);
  REQUIRE(T.has_value());
  CHECK(*T == 3);
  CHECK(ctx.g_is_zero(3));
  CHECK_FALSE(ctx.g_is_zero(2));

  FamilyContext inf_ctx = wilson_ctx();
  CHECK_FALSE(inf_ctx.termination(100).has_value());
}

TEST_CASE("connection coefficients: diagonal, explicit products") {
  FamilyContext ctx = wilson_ctx();
  for (long n = 0; n <= 8; ++n) CHECK(connection_coeff(ctx, n, n) == Complex(1L));

  // c_{n,k} = prod_{j=k}^{n-1} g_{j+1} / (h_n - h_j)
  for (long n = 1; n <= 6; ++n) {
    for (long k = 0; k < n; ++k) {
      Complex prod(1L);
      for (long j = k; j < n; ++j) prod *= ctx.g(j + 1) / ctx.h_diff(n, j);
      CHECK(testutil::drel(connection_coeff(ctx, n, k), prod) < 1e-69);
    }
  }

  // The row builder and the single-coefficient product may associate the
  // multiplications differently; allow last-ulp rounding gaps.
  auto row = connection_row(ctx, 5);
  REQUIRE(row.size() == 6);
  for (long k = 0; k <= 5; ++k)
    CHECK(testutil::dgap(row[static_cast<size_t>(k)], connection_coeff(ctx, 5, k)) < 1e-69);
}

TEST_CASE("moment orthogonality: sum_k c_{n,k} m_k = 0 for n >= 1") {
  for (const FamilyParams& p :
       {wilson_params(), testutil::generic_case2(), testutil::generic_case3()}) {
    FamilyContext ctx(p);
    for (long n = 1; n <= 20; ++n) {
      Complex sum(0L);
      Real scale(0L);
      for (long k = 0; k <= n; ++k) {
        Complex term = connection_coeff(ctx, n, k) * ctx.moment(k);
        sum += term;
        scale = max(scale, abs(term));
      }
      CHECK(testutil::residual_zero(sum, scale));
    }
  }
}

TEST_CASE("inverse connection inverts the expansion (15 x 15)") {
  FamilyContext ctx = wilson_ctx();
  const long dim = 15;
  for (long n = 0; n < dim; ++n) {
    for (long k = 0; k <= n; ++k) {
      Complex sum(0L);
      Real scale(0L);
      for (long j = k; j <= n; ++j) {
        Complex term = connection_coeff(ctx, n, j) * inverse_coeff(ctx, j, k);
        sum += term;
        scale = max(scale, abs(term));
      }
      Complex expect = (n == k) ? Complex(1L) : Complex(0L);
      CHECK(testutil::residual_zero(sum - expect, max(scale, Real(1L))));
    }
  }
}

TEST_CASE("eigen relation on coefficient rows") {
  // h_k c_{n,k} + g_{k+1} c_{n,k+1} = h_n c_{n,k} for 0 <= k < n.
  FamilyContext ctx(testutil::generic_case1());
  for (long n = 1; n <= 10; ++n) {
    for (long k = 0; k < n; ++k) {
      Complex lhs = ctx.h(k) * connection_coeff(ctx, n, k) +
                    ctx.g(k + 1) * connection_coeff(ctx, n, k + 1);
      Complex rhs = ctx.h(n) * connection_coeff(ctx, n, k);
      CHECK(testutil::residual_zero(lhs - rhs, max(abs(lhs), abs(rhs))));
    }
  }
}
