#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "sympt/extremal.hpp"
#include "sympt/random.hpp"

using namespace sympt;

namespace {

CMatrix random_hermitian(int d, std::mt19937_64& rng) {
  CMatrix g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = complex_gaussian(rng);
  return hermitian_part(g);
}

double hs(const CMatrix& a, const CMatrix& b) { return (a.adjoint() * b).trace().real(); }

RVector stacked(const std::vector<CVector>& parts) {
  Eigen::Index n = 0;
  for (const auto& p : parts) n += 2 * p.size();
  RVector out(n);
  Eigen::Index off = 0;
  for (const auto& p : parts) {
    out.segment(off, p.size()) = p.real();
    out.segment(off + p.size(), p.size()) = p.imag();
    off += 2 * p.size();
  }
  return out;
}

}  // namespace

TEST(HermitianCoordinates, RoundTripAndInnerProduct) {
  std::mt19937_64 rng(81);
  for (int d : {1, 3, 7}) {
    const CMatrix a = random_hermitian(d, rng), b = random_hermitian(d, rng);
    const RVector va = hermitian_coordinates(a), vb = hermitian_coordinates(b);
    EXPECT_EQ(va.size(), d * d);
    EXPECT_LT((hermitian_from_coordinates(va, d) - a).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_NEAR(va.dot(vb), hs(a, b), 1e-12);
  }
}

TEST(ConstraintSystem, RowsEncodeViewTimesKernelVector) {
  std::mt19937_64 rng(83);
  const int n = 6;
  const ViewSet views(n);
  const auto s = random_state(n, 2, rng);
  const auto spectra = view_spectra(views, s.matrix(), kDefaultRankTol);
  const CMatrix h = random_hermitian(n + 1, rng);
  const RVector vh = hermitian_coordinates(h);
  int checked = 0;
  for (int k = 0; k <= views.count(); ++k) {
    const CMatrix& ker = spectra[k].kernel_basis;
    if (ker.cols() == 0) continue;
    ++checked;
    std::vector<CVector> parts;
    const CMatrix hv = views.view(h, k);
    for (Eigen::Index c = 0; c < ker.cols(); ++c) parts.push_back(hv * ker.col(c));
    const RMatrix block = detail::constraint_block(views, k, ker);
    EXPECT_LT((block * vh - stacked(parts)).cwiseAbs().maxCoeff(), 1e-12) << "k=" << k;
  }
  EXPECT_GE(checked, 2);
}

TEST(ConstraintSystem, MaximallyMixedHasNoRows) {
  const auto s = SymmetricState::maximally_mixed(5);
  EXPECT_EQ(build_constraint_system(s).rows(), 0);
  EXPECT_EQ(analyze_constraints(s).nullity, 36);
}

TEST(ConstraintSystem, StateSolvesItsOwnSystem) {
  std::mt19937_64 rng(89);
  for (int n : {4, 6, 8})
    for (int rank = 1; rank <= n; rank += 3) {
      const auto s = random_state(n, rank, rng);
      const RMatrix r = build_constraint_system(s);
      EXPECT_LT((r * hermitian_coordinates(s.matrix())).cwiseAbs().maxCoeff(), 10 * kDefaultRankTol);
      EXPECT_GE(analyze_constraints(s).nullity, 1);
    }
}

TEST(ConstraintSystem, SequentialNullspaceMatchesFullSystem) {
  std::mt19937_64 rng(97);
  for (int rank : {2, 4, 6}) {
    const auto s = random_state(6, rank, rng);
    const RMatrix r = build_constraint_system(s);
    const RMatrix full_null = detail::nullspace(r, kNullTol);
    const auto ca = analyze_constraints(s);
    ASSERT_EQ(ca.nullity, full_null.cols());
    // same subspace: projectors agree
    const RMatrix p1 = full_null * full_null.transpose();
    const RMatrix p2 = ca.null_basis * ca.null_basis.transpose();
    EXPECT_LT((p1 - p2).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(ConstraintSystem, PureProductIsExtremal) {
  const auto s = SymmetricState::product(ProductVector::from_alpha(0.0), 4);
  EXPECT_EQ(analyze_constraints(s).nullity, 1);
  EXPECT_FALSE(find_direction(s, 1).has_value());
  std::mt19937_64 rng(101);
  for (int t = 0; t < 5; ++t)
    EXPECT_FALSE(find_direction(SymmetricState::product(random_product_vector(rng), 7), t).has_value());
}

TEST(FindDirection, MaximallyMixedGivesNormalizedOrthogonalDirection) {
  const auto s = SymmetricState::maximally_mixed(4);
  const auto h = find_direction(s, 5);
  ASSERT_TRUE(h.has_value());
  EXPECT_LT(hermiticity_error(h->matrix), 1e-12);
  EXPECT_NEAR(h->matrix.norm(), 1.0, 1e-12);
  EXPECT_LT(std::abs(hs(h->matrix, s.matrix())), 1e-10);
  EXPECT_NEAR(h->trace, h->matrix.trace().real(), 1e-15);
}

TEST(FindDirection, SatisfiesConstraints) {
  std::mt19937_64 rng(103);
  for (int t = 0; t < 5; ++t) {
    const auto s = random_state(6, 4, rng);
    const auto h = find_direction(s, t);
    ASSERT_TRUE(h.has_value());
    const RMatrix r = build_constraint_system(s);
    EXPECT_LT((r * hermitian_coordinates(h->matrix)).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(FindDirection, ZeroNullityIsAnInternalError) {
  ConstraintAnalysis ca;
  ca.null_basis = RMatrix(25, 0);
  ca.nullity = 0;
  std::mt19937_64 rng(1);
  EXPECT_THROW(draw_direction(SymmetricState::maximally_mixed(4).matrix(), ca, rng), internal_error);
}

TEST(LineStep, TracePreservedAndContinuousAtZero) {
  const auto s = SymmetricState::maximally_mixed(4);
  const auto h = *find_direction(s, 9);
  EXPECT_EQ((move_along(s.matrix(), h, 0.0) - s.matrix()).cwiseAbs().maxCoeff(), 0.0);
  for (double x : {-1.0, 0.5, 7.0}) EXPECT_NEAR(move_along(s.matrix(), h, x).trace().real(), 1.0, 1e-13);
}

TEST(LineStep, FromMaximallyMixedDropsExactlyOneRank) {
  const auto s = SymmetricState::maximally_mixed(4);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto h = *find_direction(s, seed);
    const auto step = line_search_step(s, h);
    const auto out = SymmetricState::from_matrix(4, step.state);
    EXPECT_TRUE(is_ppt(out).ppt);
    ASSERT_EQ(step.dropped_views.size(), 1u);
    RankProfile expected{5, 8, 9};
    expected[step.dropped_view()] -= 1;
    EXPECT_EQ(step.profile, expected);
    EXPECT_EQ(rank_profile(out), expected);
  }
}

TEST(LineStep, ZeroDirectionIsDegenerate) {
  const auto s = SymmetricState::maximally_mixed(4);
  const HermitianDirection zero{CMatrix::Zero(5, 5), 0.0};
  EXPECT_THROW(line_search_step(s, zero), degenerate_direction);
}

TEST(RunToExtremal, FourQubitTerminals) {
  int entangled = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    SearchOptions opt;
    opt.keep_states = true;
    const auto tr = run_to_extremal(4, seed, opt);
    ASSERT_FALSE(tr.aborted) << tr.diagnostic;
    ASSERT_TRUE(tr.terminal_extremal);
    EXPECT_EQ(tr.initial_profile, (RankProfile{5, 8, 9}));
    EXPECT_LE(static_cast<int>(tr.steps.size()), 22);
    if (tr.entangled()) {
      ++entangled;
      EXPECT_EQ(tr.terminal_profile, (RankProfile{5, 7, 8}));
      EXPECT_EQ(tr.terminal_classification.verdict, Verdict::CandidateEntangled);
    } else {
      EXPECT_EQ(tr.terminal_profile, (RankProfile{1, 1, 1}));
      EXPECT_EQ(tr.terminal_classification.verdict, Verdict::Separable);
    }

    RankProfile prev = tr.initial_profile;
    for (const auto& st : tr.steps) {
      bool dropped = false;
      for (int k = 0; k < prev.size(); ++k) {
        EXPECT_LE(st.profile[k], prev[k]);
        dropped = dropped || st.profile[k] < prev[k];
      }
      EXPECT_TRUE(dropped);
      EXPECT_GE(st.dropped_view, 0);
      prev = st.profile;
    }
    for (const auto& m : tr.states) EXPECT_TRUE(is_ppt(SymmetricState::normalized(4, m)).ppt);
    EXPECT_EQ(analyze_constraints(SymmetricState::normalized(4, tr.terminal)).nullity, 1);
  }
  EXPECT_GT(entangled, 0);
}

TEST(RunToExtremal, FiveQubitEntangledProfile) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto tr = run_to_extremal(5, seed);
    ASSERT_TRUE(tr.terminal_extremal);
    if (tr.entangled()) EXPECT_EQ(tr.terminal_profile, (RankProfile{6, 10, 10}));
  }
}

TEST(RunToExtremal, Deterministic) {
  const auto a = run_to_extremal(6, 1234);
  const auto b = run_to_extremal(6, 1234);
  ASSERT_EQ(a.steps.size(), b.steps.size());
  for (std::size_t i = 0; i < a.steps.size(); ++i) {
    EXPECT_EQ(a.steps[i].x_star, b.steps[i].x_star);
    EXPECT_EQ(a.steps[i].profile, b.steps[i].profile);
  }
  EXPECT_TRUE(a.terminal == b.terminal);
}

TEST(RunToExtremal, TargetedFloorKeepsProfile) {
  SearchOptions opt;
  opt.accept = target_floor({5, 7, 8});
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto tr = run_to_extremal(4, seed, opt);
    ASSERT_TRUE(tr.terminal_extremal);
    EXPECT_EQ(tr.terminal_profile, (RankProfile{5, 7, 8}));
    for (const auto& st : tr.steps) EXPECT_TRUE(st.targeted);
  }
}

TEST(RunToExtremal, TerminalStatesFixedPoint) {
  const auto& s = fixtures::entangled_terminal(6);
  EXPECT_FALSE(find_direction(s, 3).has_value());
  EXPECT_TRUE(is_ppt(s).ppt);
}

TEST(RunSeed, DistinctAndStable) {
  EXPECT_EQ(run_seed(1, 0), run_seed(1, 0));
  EXPECT_NE(run_seed(1, 0), run_seed(1, 1));
  EXPECT_NE(run_seed(1, 0), run_seed(2, 0));
}
