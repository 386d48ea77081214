#include <doctest.h>

#include <algorithm>

#include "ortho/families.hpp"
#include "ortho/verify.hpp"
#include "test_util.hpp"

using namespace ortho;
using testutil::C;
using testutil::R;

namespace {

FamilyContext context(const std::string& id, const std::map<std::string, Complex>& args) {
  return FamilyContext(make_family(id, args).params);
}

}  // namespace

TEST_CASE("finite family: the full gram matrix is exact") {
  FamilyContext ctx = context("hahn", {{"alpha", C(0L)}, {"beta", C(0L)}, {"N", C(2L)}});
  GramReport rep = gram_matrix(ctx, 2, 3);
  CHECK(rep.nmax == 2);
  CHECK(rep.K == 3);
  CHECK_FALSE(rep.truncated);
  CHECK(rep.tail_allowance.is_zero());
  CHECK(static_cast<double>(rep.offdiag_max) < 1e-65);
  CHECK(static_cast<double>(rep.diag_rel_err) < 1e-65);
  REQUIRE(rep.diag_rel.size() == 3);
  REQUIRE(rep.gram.size() == 3);
  REQUIRE(rep.norms.size() == 3);
  CHECK(testutil::dgap(rep.norms[0], C(1L)) == 0.0);
  // Spot check one entry: G_00 = sum of the weights = 1.
  CHECK(testutil::dgap(rep.gram[0][0], C(1L)) < 1e-70);
}

TEST_CASE("finite family: truncating below N+1 nodes is flagged") {
  FamilyContext ctx = context("krawtchouk", {{"p", R("0.3")}, {"N", C(10L)}});
  GramReport full = gram_matrix(ctx, 3, 11);
  CHECK_FALSE(full.truncated);
  CHECK(static_cast<double>(full.offdiag_max) < 1e-60);

  GramReport cut = gram_matrix(ctx, 3, 8);
  CHECK(cut.truncated);
  // 8 of 11 binomial nodes is a real truncation: the defect must be visible.
  CHECK(static_cast<double>(cut.offdiag_max) > 1e-12);
}

TEST_CASE("poisson weights: truncated gram matrix converges") {
  FamilyContext ctx = context("charlier", {{"a", C(1L)}});
  GramReport rep = gram_matrix(ctx, 4, 60);
  CHECK(rep.truncated);
  CHECK(rep.tail_allowance.is_finite());
  CHECK(static_cast<double>(rep.offdiag_max) < 1e-20);
  CHECK(static_cast<double>(rep.diag_rel_err) < 1e-20);
  // The factorial tail at K = 60 is far below any polynomial fit's estimate,
  // so the allowance must comfortably cover the actual defect.
  CHECK(static_cast<double>(rep.offdiag_max) <=
        std::max(1e-40, static_cast<double>(rep.tail_allowance)));
  for (size_t n = 0; n < rep.norms.size(); ++n)
    CHECK(testutil::drel(rep.norms[n], norm_K(ctx, static_cast<long>(n))) == 0.0);
}

TEST_CASE("negative-binomial weights: slower geometric decay still verifies") {
  FamilyContext ctx = context("meixner", {{"c", Complex(R("1") / R("3"))}, {"beta", C(2L)}});
  GramReport rep = gram_matrix(ctx, 3, 150);
  CHECK(rep.truncated);
  CHECK(rep.tail_allowance.is_finite());
  CHECK(static_cast<double>(rep.offdiag_max) < 1e-25);
  CHECK(static_cast<double>(rep.diag_rel_err) < 1e-25);
}

TEST_CASE("gram matrix is symmetric and matches a hand sum") {
  FamilyContext ctx = context("charlier", {{"a", C(1L)}});
  GramReport rep = gram_matrix(ctx, 3, 40);
  for (long n = 0; n <= 3; ++n)
    for (long m = 0; m <= 3; ++m)
      CHECK(testutil::dgap(rep.gram[static_cast<size_t>(n)][static_cast<size_t>(m)],
                           rep.gram[static_cast<size_t>(m)][static_cast<size_t>(n)]) == 0.0);

  // Recompute G_21 independently.
  WeightTable table = weight_table(ctx, 40);
  Complex hand(0L);
  for (const auto& e : table.entries)
    hand += u_eval(ctx, 2, e.node) * u_eval(ctx, 1, e.node) * e.weight;
  CHECK(testutil::drel(rep.gram[2][1], hand) < 1e-50);
}

TEST_CASE("moment recovery from the weights") {
  SUBCASE("charlier") {
    FamilyContext ctx = context("charlier", {{"a", C(1L)}});
    MomentRecovery rec = moment_recovery(ctx, 10, 60);
    CHECK(rec.kmax == 10);
    CHECK(rec.K == 60);
    REQUIRE(rec.rel_errors.size() == 11);
    CHECK(static_cast<double>(rec.worst) < 1e-20);
  }
  SUBCASE("finite krawtchouk is exact") {
    FamilyContext ctx = context("krawtchouk", {{"p", R("0.3")}, {"N", C(10L)}});
    MomentRecovery rec = moment_recovery(ctx, 10, 11);
    CHECK(static_cast<double>(rec.worst) < 1e-60);
  }
}

TEST_CASE("preconditions") {
  FamilyContext ctx = context("charlier", {{"a", C(1L)}});
  CHECK_THROWS_AS(gram_matrix(ctx, -1, 10), ParameterError);
  CHECK_THROWS_AS(gram_matrix(ctx, 5, 5), ParameterError);  // K < nmax+1
  CHECK_THROWS_AS(moment_recovery(ctx, 3, 0), ParameterError);
}
