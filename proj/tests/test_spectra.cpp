#include <gtest/gtest.h>

#include <cstdlib>
#include <random>

#include "sympt/oracle.hpp"
#include "sympt/random.hpp"
#include "sympt/spectra.hpp"

using namespace sympt;

TEST(SpectralSummary, IdentityHasFullRank) {
  const auto s = spectral_summary(CMatrix::Identity(5, 5) / 5.0);
  EXPECT_EQ(s.rank, 5);
  EXPECT_EQ(s.kernel_dim(), 0);
  EXPECT_EQ(s.tolerance_used, kDefaultRankTol);
}

TEST(SpectralSummary, ProjectorHasRankOne) {
  CMatrix p = CMatrix::Zero(5, 5);
  p(0, 0) = 1.0;
  const auto s = spectral_summary(p);
  EXPECT_EQ(s.rank, 1);
  EXPECT_EQ(s.kernel_dim(), 4);
  EXPECT_LT((s.kernel_basis.adjoint() * s.kernel_basis - CMatrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT(s.kernel_basis.row(0).norm(), 1e-15);
}

TEST(SpectralSummary, TripletView) {
  const auto v = partial_transpose_view(SymmetricState::dicke(2, 1), 1);
  const auto s = spectral_summary(v.matrix);
  EXPECT_EQ(s.rank, 4);
  EXPECT_EQ(s.kernel_dim(), 0);
  EXPECT_NEAR(s.min_eigenvalue(), -0.5, 1e-14);
}

TEST(SpectralSummary, RejectsNonHermitian) {
  CMatrix m = CMatrix::Identity(3, 3);
  m(0, 2) = 1.0;
  EXPECT_THROW(spectral_summary(m), invalid_input);
}

TEST(SpectralSummary, RelativeRankRuleAndBorderline) {
  RVector d(4);
  d << 10.0, 1.0, 2e-7, 5e-8;
  const CMatrix m = d.cast<cplx>().asDiagonal();
  const auto s = spectral_summary(m, 1e-8);
  // cutoff = 1e-8 * 10
  EXPECT_EQ(s.rank, 3);
  EXPECT_DOUBLE_EQ(s.threshold, 1e-7);
  EXPECT_EQ(s.borderline, 2);
  EXPECT_EQ(spectral_summary(m, 1e-9).rank, 4);
}

TEST(SpectralSummary, KernelVectorsAreAnnihilated) {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 20; ++t) {
    const auto st = random_state(8, 3, rng);
    const ViewSet views(8);
    for (int k = 0; k <= 4; ++k) {
      const CMatrix m = views.view(st.matrix(), k);
      const auto s = spectral_summary(m);
      EXPECT_EQ(s.rank + s.kernel_dim(), views.dim(k));
      if (s.kernel_dim() == 0) continue;
      const double bound = 10 * s.tolerance_used * m.norm();
      EXPECT_LE((m * s.kernel_basis).colwise().norm().maxCoeff(), bound);
    }
  }
}

TEST(IsPpt, TripletFailsWithWitness) {
  const auto r = is_ppt(SymmetricState::dicke(2, 1));
  EXPECT_FALSE(r.ppt);
  EXPECT_NEAR(r.min_eigenvalue, -0.5, 1e-14);
  EXPECT_EQ(r.worst_k, 1);
}

TEST(IsPpt, SeparableStatesPass) {
  EXPECT_TRUE(is_ppt(SymmetricState::maximally_mixed(4)).ppt);
  const CVector u = product_state_coords(ProductVector::from_alpha(1.0), 4).normalized();
  const CVector v = product_state_coords(ProductVector::from_alpha(-1.0), 4).normalized();
  const auto s = SymmetricState::normalized(4, u * u.adjoint() + v * v.adjoint());
  EXPECT_TRUE(is_ppt(s).ppt);
}

TEST(RankProfileOf, KnownProfiles) {
  EXPECT_EQ(rank_profile(SymmetricState::maximally_mixed(4)), (RankProfile{5, 8, 9}));
  EXPECT_EQ(rank_profile(SymmetricState::maximally_mixed(6)), (RankProfile{7, 12, 15, 16}));
  std::mt19937_64 rng(43);
  for (int n = 2; n <= 11; ++n) {
    const auto p = rank_profile(SymmetricState::product(random_product_vector(rng), n));
    EXPECT_EQ(p.size(), n / 2 + 1);
    for (int r : p.ranks) EXPECT_EQ(r, 1);
  }
}

TEST(RankProfileOf, InvariantUnderPositiveScaling) {
  std::mt19937_64 rng(47);
  const ViewSet views(6);
  for (int t = 0; t < 10; ++t) {
    const auto s = random_state(6, 1 + t % 7, rng);
    const RankProfile p = profile_of(view_spectra(views, s.matrix(), kDefaultRankTol));
    EXPECT_EQ(profile_of(view_spectra(views, s.matrix() * 3.7, kDefaultRankTol)), p);
  }
}

TEST(RankProfileOf, MatchesFullSpaceOracle) {
  std::mt19937_64 rng(53);
  for (int n = 2; n <= 6; ++n)
    for (int t = 0; t < 10; ++t) {
      const auto s = random_state(n, rng);
      EXPECT_EQ(rank_profile(s), oracle::rank_profile(s));
    }
}

TEST(MaxRankProfile, Formula) {
  EXPECT_EQ(max_rank_profile(4), (RankProfile{5, 8, 9}));
  EXPECT_EQ(max_rank_profile(5), (RankProfile{6, 10, 12}));
  EXPECT_EQ(max_rank_profile(2), (RankProfile{3, 4}));
  EXPECT_THROW(max_rank_profile(1), invalid_input);
}

TEST(RankProfileType, ParseFormatAndOrder) {
  EXPECT_EQ(RankProfile::parse("5,7,8"), (RankProfile{5, 7, 8}));
  EXPECT_EQ(RankProfile::parse("5-7-8"), (RankProfile{5, 7, 8}));
  EXPECT_EQ(RankProfile::parse(" 7, 12 ,14,13"), (RankProfile{7, 12, 14, 13}));
  EXPECT_EQ((RankProfile{5, 7, 8}).to_string(), "5-7-8");
  EXPECT_EQ((RankProfile{5, 7, 8}).to_string(","), "5,7,8");
  EXPECT_LT((RankProfile{5, 7, 8}), (RankProfile{5, 8, 7}));
  EXPECT_EQ((RankProfile{5, 7, 8}).sum(), 20);
  EXPECT_THROW(RankProfile::parse("5,,8"), invalid_input);
  EXPECT_THROW(RankProfile::parse("5,x,8"), invalid_input);
  EXPECT_THROW(RankProfile::parse(""), invalid_input);
}

TEST(DefaultTolerance, EnvironmentOverride) {
  ::unsetenv("SYMPT_DEFAULT_TOL");
  EXPECT_EQ(default_rank_tol(), 1e-8);
  ::setenv("SYMPT_DEFAULT_TOL", "1e-6", 1);
  EXPECT_EQ(default_rank_tol(), 1e-6);
  ::setenv("SYMPT_DEFAULT_TOL", "garbage", 1);
  EXPECT_EQ(default_rank_tol(), 1e-8);
  ::unsetenv("SYMPT_DEFAULT_TOL");
}
