#include <doctest.h>

#include <set>
#include <string>

#include "ortho/families.hpp"
#include "ortho/recurrence.hpp"
#include "ortho/weights.hpp"
#include "test_util.hpp"

using namespace ortho;
using testutil::C;
using testutil::R;

TEST_CASE("catalog lists every family with its argument names") {
  const auto& cat = family_catalog();
  REQUIRE(cat.size() == 7);
  std::set<std::string> ids;
  for (const auto& fi : cat) ids.insert(fi.id);
  CHECK(ids == std::set<std::string>{"wilson", "continuous-hahn", "hahn",
                                     "continuous-dual-hahn", "krawtchouk", "meixner",
                                     "charlier"});
  auto args_of = [&](const std::string& id) {
    for (const auto& fi : cat)
      if (fi.id == id) return fi.arg_names;
    return std::vector<std::string>{};
  };
  CHECK(args_of("wilson") == std::vector<std::string>{"a", "b", "c", "d"});
  CHECK(args_of("continuous-hahn") == std::vector<std::string>{"a", "b", "c", "d"});
  CHECK(args_of("hahn") == std::vector<std::string>{"alpha", "beta", "N"});
  CHECK(args_of("continuous-dual-hahn") == std::vector<std::string>{"a", "b", "c"});
  CHECK(args_of("krawtchouk") == std::vector<std::string>{"p", "N"});
  CHECK(args_of("meixner") == std::vector<std::string>{"c", "beta"});
  CHECK(args_of("charlier") == std::vector<std::string>{"a"});
}

TEST_CASE("argument validation") {
  CHECK_THROWS_WITH_AS(make_family("nosuch", {}), doctest::Contains("unknown family"),
                       ParameterError);
  CHECK_THROWS_WITH_AS(make_family("charlier", {}), doctest::Contains("requires argument"),
                       ParameterError);
  CHECK_THROWS_WITH_AS(make_family("charlier", {{"a", C(1L)}, {"b", C(2L)}}),
                       doctest::Contains("does not take argument"), ParameterError);
  CHECK_THROWS_WITH_AS(make_family("krawtchouk", {{"p", R("0.3")}, {"N", C("2.5")}}),
                       doctest::Contains("positive integer"), ParameterError);
  CHECK_THROWS_WITH_AS(make_family("krawtchouk", {{"p", R("0.3")}, {"N", C(0L)}}),
                       doctest::Contains("positive integer"), ParameterError);
  CHECK_THROWS_WITH_AS(
      make_family("hahn", {{"alpha", C(0L)}, {"beta", C(0L)}, {"N", C(-3L)}}),
      doctest::Contains("positive integer"), ParameterError);
  CHECK_THROWS_AS(make_family("krawtchouk", {{"p", C(0L)}, {"N", C(4L)}}), ParameterError);
  CHECK_THROWS_AS(make_family("krawtchouk", {{"p", C(1L)}, {"N", C(4L)}}), ParameterError);
  CHECK_THROWS_AS(make_family("meixner", {{"c", C(0L)}, {"beta", C(1L)}}), ParameterError);
  CHECK_THROWS_AS(make_family("meixner", {{"c", C(1L)}, {"beta", C(1L)}}), ParameterError);
  CHECK_THROWS_AS(make_family("charlier", {{"a", C(0L)}}), ParameterError);
}

TEST_CASE("lattice parameters land on the advertised case") {
  auto case_of = [](const FamilySpec& spec) {
    return case_label(FamilyContext(spec.params).lattice_case());
  };
  CHECK(case_of(make_family("wilson", {{"a", R("0.5")}, {"b", R("0.6")},
                                       {"c", R("0.7")}, {"d", R("0.8")}})) == "case1");
  CHECK(case_of(make_family("continuous-hahn", {{"a", R("0.5")}, {"b", R("1.5")},
                                                {"c", R("0.5")}, {"d", R("0.5")}})) ==
        "case2");
  CHECK(case_of(make_family("hahn", {{"alpha", C(0L)}, {"beta", C(0L)}, {"N", C(5L)}})) ==
        "case2");
  CHECK(case_of(make_family("continuous-dual-hahn",
                            {{"a", R("0.3")}, {"b", R("0.4")}, {"c", R("0.5")}})) ==
        "case3");
  CHECK(case_of(make_family("krawtchouk", {{"p", R("0.3")}, {"N", C(10L)}})) == "case4");
  CHECK(case_of(make_family("meixner",
                            {{"c", Complex(R("1") / R("3"))}, {"beta", C(2L)}})) ==
        "case4");
  CHECK(case_of(make_family("charlier", {{"a", C(1L)}})) == "case4");
}

TEST_CASE("wilson lattice parameters have the expected closed form") {
  auto spec = make_family("wilson", {{"a", R("0.5")}, {"b", R("0.6")},
                                     {"c", R("0.7")}, {"d", R("0.8")}});
  // a2 = 1, a1 = a+b+c+d-1, b2 = 1, b1 = 2c, b0 = c^2.
  CHECK(testutil::dgap(spec.params.a2, C(1L)) == 0.0);
  CHECK(testutil::dgap(spec.params.a1, C("1.6")) < 1e-70);
  CHECK(testutil::dgap(spec.params.b2, C(1L)) == 0.0);
  CHECK(testutil::dgap(spec.params.b1, C("1.4")) < 1e-70);
  CHECK(testutil::dgap(spec.params.b0, C("0.49")) < 1e-70);
  // Nodes: x_k = (k + c)^2.
  FamilyContext ctx(spec.params);
  CHECK(testutil::dgap(ctx.x(3), C("13.69")) < 1e-70);  // 3.7^2
}

TEST_CASE("classical closed-form weights") {
  SUBCASE("charlier: poisson") {
    auto spec = make_family("charlier", {{"a", C(1L)}});
    Complex r0 = *classical_weight(spec, 0);
    CHECK(testutil::dgap(r0, Complex(exp(Real(-1L)))) < 1e-70);
  }
  SUBCASE("krawtchouk: binomial, sums to one") {
    auto spec = make_family("krawtchouk", {{"p", R("0.3")}, {"N", C(10L)}});
    Complex sum(0L);
    for (long k = 0; k <= 10; ++k) sum += *classical_weight(spec, k);
    CHECK(testutil::dgap(sum, C(1L)) < 1e-70);
    // Spot value: C(10,2) 0.3^2 0.7^8.
    Complex r2 = *classical_weight(spec, 2);
    Complex expect = C(45L) * pow(C("0.3"), 2) * pow(C("0.7"), 8);
    CHECK(testutil::dgap(r2, expect) < 1e-70);
  }
  SUBCASE("hahn thirds") {
    auto spec = make_family("hahn", {{"alpha", C(0L)}, {"beta", C(0L)}, {"N", C(2L)}});
    for (long k = 0; k <= 2; ++k)
      CHECK(testutil::dgap(*classical_weight(spec, k), C(1L) / C(3L)) < 1e-70);
  }
  SUBCASE("meixner: negative binomial, sums to one") {
    auto spec = make_family("meixner", {{"c", Complex(R("1") / R("3"))}, {"beta", C(2L)}});
    Complex sum(0L);
    for (long k = 0; k <= 120; ++k) sum += *classical_weight(spec, k);
    CHECK(testutil::dgap(sum, C(1L)) < 1e-28);
  }
  SUBCASE("families without a recorded closed form return nullopt") {
    auto spec = make_family("wilson", {{"a", R("0.75")}, {"b", R("0.75")},
                                       {"c", R("0.75")}, {"d", R("0.75")}});
    CHECK_FALSE(classical_weight(spec, 0).has_value());
  }
}

TEST_CASE("closed-form alpha matches the recurrence construction") {
  auto compare = [](const FamilySpec& spec, long nmax) {
    FamilyContext ctx(spec.params);
    for (long n = 1; n <= nmax; ++n) {
      auto closed = alpha_closed_form(spec, n);
      REQUIRE(closed.has_value());
      CHECK(testutil::drel(alpha(ctx, n), *closed) < 1e-60);
    }
  };
  compare(make_family("wilson", {{"a", R("0.5")}, {"b", R("0.6")},
                                 {"c", R("0.7")}, {"d", R("0.8")}}),
          8);
  compare(make_family("continuous-hahn", {{"a", R("0.5")}, {"b", R("0.5")},
                                          {"c", R("0.5")}, {"d", R("0.5")}}),
          8);
  compare(make_family("continuous-hahn", {{"a", R("0.5")}, {"b", R("1.5")},
                                          {"c", R("0.5")}, {"d", R("0.5")}}),
          8);

  // Hand value: continuous Hahn at a=b=c=d=1/2 has alpha_1 = 1/12.
  auto ch = make_family("continuous-hahn", {{"a", R("0.5")}, {"b", R("0.5")},
                                            {"c", R("0.5")}, {"d", R("0.5")}});
  CHECK(testutil::dgap(*alpha_closed_form(ch, 1), C(1L) / C(12L)) < 1e-70);

  CHECK_FALSE(alpha_closed_form(make_family("charlier", {{"a", C(1L)}}), 1).has_value());
  CHECK_THROWS_AS(alpha_closed_form(ch, 0), ParameterError);
}

TEST_CASE("generalized binomial coefficient") {
  CHECK(testutil::dgap(binomial(C(10L), 3), C(120L)) == 0.0);
  CHECK(testutil::dgap(binomial(C("2.75"), 0), C(1L)) == 0.0);
  // C(1/2, 2) = (1/2)(-1/2)/2 = -1/8.
  CHECK(testutil::dgap(binomial(C("0.5"), 2), C("-0.125")) < 1e-70);
  CHECK(binomial(C(3L), -1).is_zero());
}
