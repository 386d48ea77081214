#include <doctest.h>

#include "ortho/families.hpp"
#include "ortho/lattice.hpp"
#include "test_util.hpp"

using namespace ortho;
using testutil::C;
using testutil::R;

TEST_CASE("case classification by exact zero tests") {
  CHECK(classify(testutil::generic_case1()) == LatticeCase::Case1);
  CHECK(classify(testutil::generic_case2()) == LatticeCase::Case2);
  CHECK(classify(testutil::generic_case3()) == LatticeCase::Case3);

  FamilyParams p4;
  p4.a1 = C(1L);
  p4.b1 = C(1L);
  p4.d2 = C(-1L);
  CHECK(classify(p4) == LatticeCase::Case4);

  CHECK(case_number(LatticeCase::Case3) == 3);
  CHECK(case_label(LatticeCase::Case1) == "case1");
  CHECK(case_label(LatticeCase::Case4) == "case4");
}

TEST_CASE("lattice sequences") {
  // x_k = b0 + b1 k + b2 k^2, h_k = a1 k + a2 k^2, g_k = x_{k-1} h_k + e_k.
  FamilyParams p = testutil::generic_case1();
  CHECK(p.x_at(0) == p.b0);
  CHECK(p.h_at(0) == Complex(0L));
  CHECK(p.g_at(0) == Complex(0L));
  // The implementation evaluates in Horner form; allow last-ulp rounding gaps.
  CHECK(testutil::dgap(p.x_at(3), p.b0 + p.b1 * Complex(3L) + p.b2 * Complex(9L)) < 1e-70);
  CHECK(testutil::dgap(p.h_at(2), p.a1 * Complex(2L) + p.a2 * Complex(4L)) < 1e-70);
  CHECK(testutil::dgap(p.e_at(2), p.d1 * Complex(2L) + p.d2 * Complex(4L)) < 1e-70);
  for (long k = 1; k <= 6; ++k)
    CHECK(testutil::dgap(p.g_at(k), p.x_at(k - 1) * p.h_at(k) + p.e_at(k)) == 0.0);
}

TEST_CASE("charlier-shaped parameters give g_k = -a k") {
  // a1=1, b1=1, d1=1-a, d2=-1  ->  g_k = (k-1)k + (1-a)k - k^2 = -a k.
  Real a = R("1.75");
  FamilyParams p;
  p.a1 = C(1L);
  p.b1 = C(1L);
  p.d1 = Complex(Real(1L) - a);
  p.d2 = C(-1L);
  for (long k = 1; k <= 10; ++k)
    CHECK(testutil::dgap(p.g_at(k), Complex(-a * Real(k))) < 1e-70);
}

TEST_CASE("validation accepts the classical presets") {
  auto charlier = make_family("charlier", {{"a", C(1L)}});
  ValidationReport rep = validate(charlier.params, 50);
  CHECK(rep.ok());
  CHECK(rep.case_id == LatticeCase::Case4);
  CHECK(rep.x_nonconstant);
  CHECK(rep.h_nonconstant);
  CHECK(rep.h_distinct);
  CHECK(rep.x_distinct);
  CHECK_FALSE(rep.terminating_at.has_value());

  auto wilson = make_family("wilson", {{"a", R("0.5")}, {"b", R("0.6")},
                                       {"c", R("0.7")}, {"d", R("0.8")}});
  CHECK(validate(wilson.params, 50).ok());
}

TEST_CASE("validation finds termination for finite families") {
  auto kraw = make_family("krawtchouk", {{"p", R("0.3")}, {"N", C(10L)}});
  ValidationReport rep = validate(kraw.params, 50);
  CHECK(rep.ok());
  CHECK(rep.terminating_at.has_value());
  CHECK(*rep.terminating_at == 11);  // g_{N+1} = 0: members u_0..u_10

  auto hahn = make_family("hahn", {{"alpha", C(0L)}, {"beta", C(0L)}, {"N", C(2L)}});
  ValidationReport hrep = validate(hahn.params, 50);
  CHECK(hrep.ok());
  CHECK(*hrep.terminating_at == 3);
}

TEST_CASE("validation rejects constant sequences") {
  FamilyParams p;  // everything zero: x and h both constant
  ValidationReport rep = validate(p, 20);
  CHECK_FALSE(rep.ok());
  CHECK_FALSE(rep.x_nonconstant);
  CHECK_FALSE(rep.h_nonconstant);
  CHECK(rep.messages.size() >= 2);

  FamilyParams q;  // h fine, x constant
  q.a1 = C(1L);
  q.d1 = C(1L);
  ValidationReport qrep = validate(q, 20);
  CHECK_FALSE(qrep.ok());
  CHECK_FALSE(qrep.x_nonconstant);
  CHECK(qrep.h_nonconstant);
}

TEST_CASE("validation detects eigenvalue and node collisions") {
  // h_k = k - k^2/4: h_1 = h_3 = 3/4.
  FamilyParams p;
  p.a1 = C(1L);
  p.a2 = C("-0.25");
  p.b1 = C(1L);
  p.d1 = C(1L);
  ValidationReport rep = validate(p, 20);
  CHECK_FALSE(rep.ok());
  CHECK_FALSE(rep.h_distinct);

  // x_k = k^2 - 2k: x_0 = x_2 = 0.
  FamilyParams q;
  q.a1 = C(1L);
  q.b1 = C(-2L);
  q.b2 = C(1L);
  q.d1 = C(1L);
  q.d2 = C(1L);
  ValidationReport qrep = validate(q, 20);
  CHECK_FALSE(qrep.ok());
  CHECK_FALSE(qrep.x_distinct);
}
