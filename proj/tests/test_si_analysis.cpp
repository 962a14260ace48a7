#include <gtest/gtest.h>

#include <algorithm>

#include "sidi/si_analysis.hpp"
#include "test_support.hpp"

namespace sidi {
namespace {

using namespace sidi::testing;

CMatrix upper2(double a, double b, double d) {
  CMatrix m(2, 2);
  m << a, b, 0.0, d;
  return m;
}

TEST(Irreducibility, JordanBlockAndDistinctEigenvalues) {
  const Tolerances tol;
  EXPECT_TRUE(is_irreducible(jordan_block(4, 0.0), tol));
  EXPECT_TRUE(is_strongly_irreducible(jordan_block(4, 0.0), tol));
  // Irreducible (no common reducing subspace with A*) yet splits by similarity.
  const CMatrix a = upper2(1.0, 1.0, 2.0);
  EXPECT_TRUE(is_irreducible(a, tol));
  EXPECT_FALSE(is_strongly_irreducible(a, tol));
  EXPECT_FALSE(is_irreducible(CMatrix::Identity(2, 2), tol));
  EXPECT_FALSE(is_strongly_irreducible(CMatrix::Identity(2, 2), tol));
  EXPECT_TRUE(is_strongly_irreducible(CMatrix::Constant(1, 1, 3.0), tol));
}

TEST(StrongIrreducibility, InvariantUnderSimilarity) {
  const Tolerances tol;
  Rng rng(41);
  for (int trial = 0; trial < 40; ++trial) {
    const JordanSpec spec = random_jordan_spec(6, rng);
    const CMatrix x = random_with_cond(spec.dim(), random_cond(100.0, rng), rng);
    const CMatrix a = x * jordan_matrix(spec) * x.inverse();
    EXPECT_EQ(is_strongly_irreducible(a, tol), spec.sizes.size() == 1) << trial;
  }
}

TEST(JordanStructure, RecoversBlockSizes) {
  const Tolerances tol;
  Rng rng(43);
  for (int trial = 0; trial < 60; ++trial) {
    const JordanSpec spec = random_jordan_spec(7, rng);
    const CMatrix x = random_with_cond(spec.dim(), random_cond(10.0, rng), rng);
    const JordanStructure js = jordan_structure(x * jordan_matrix(spec) * x.inverse(), tol);
    EXPECT_EQ(js.dimension(), spec.dim());
    EXPECT_EQ(js.block_count(), static_cast<int>(spec.sizes.size()));
    EXPECT_EQ(static_cast<int>(js.clusters.size()), spec.distinct());
    for (const JordanCluster& c : js.clusters) {
      std::vector<int> want;
      for (std::size_t k = 0; k < spec.sizes.size(); ++k) {
        if (std::abs(spec.eigenvalues[k] - c.eigenvalue) < 1e-6) want.push_back(spec.sizes[k]);
      }
      std::sort(want.rbegin(), want.rend());
      EXPECT_EQ(c.block_sizes, want) << trial;
    }
  }
}

TEST(SISplit, BlocksAreStronglyIrreducibleAndReconstruct) {
  const Tolerances tol;
  Rng rng(47);
  for (int trial = 0; trial < 40; ++trial) {
    const JordanSpec spec = random_jordan_spec(6, rng);
    const CMatrix x = random_with_cond(spec.dim(), random_cond(10.0, rng), rng);
    const CMatrix a = x * jordan_matrix(spec) * x.inverse();
    const SISplit s = si_split(a, tol);
    ASSERT_EQ(s.blocks.size(), spec.sizes.size()) << trial;
    EXPECT_LT((s.similarity * s.basis - CMatrix::Identity(spec.dim(), spec.dim())).norm(), 1e-9);
    EXPECT_LT((s.similarity * a * s.basis - direct_sum(s.blocks)).norm() / std::max(1.0, op_norm(a)), 1e-9);
    EXPECT_LT(s.reconstruction_error / std::max(1.0, op_norm(a)), 1e-9);
    std::vector<int> got_sizes, want_sizes = spec.sizes;
    for (const CMatrix& b : s.blocks) {
      EXPECT_TRUE(is_strongly_irreducible(b, tol));
      got_sizes.push_back(static_cast<int>(b.rows()));
    }
    std::sort(got_sizes.begin(), got_sizes.end());
    std::sort(want_sizes.begin(), want_sizes.end());
    EXPECT_EQ(got_sizes, want_sizes);
  }
}

TEST(SISplit, TwoByTwoDistinct) {
  const SISplit s = si_split(upper2(1.0, 1.0, 2.0), Tolerances{});
  ASSERT_EQ(s.blocks.size(), 2u);
  EXPECT_EQ(s.blocks[0].rows(), 1);
  std::vector<double> ev{s.eigenvalues[0].real(), s.eigenvalues[1].real()};
  std::sort(ev.begin(), ev.end());
  EXPECT_NEAR(ev[0], 1.0, 1e-14);
  EXPECT_NEAR(ev[1], 2.0, 1e-14);
}

TEST(Dunford, ClosedForms) {
  const Tolerances tol;
  {
    const DunfordSplit d = dunford_split(jordan_block(2, 0.5), tol);
    EXPECT_LT((d.scalar_part - 0.5 * CMatrix::Identity(2, 2)).norm(), 1e-15);
    EXPECT_LT((d.nilpotent_part - jordan_block(2, 0.0)).norm(), 1e-15);
  }
  {
    // lambda = 0.3 with off-diagonal 2: S = 0.3 I, R = [[0, 2], [0, 0]].
    const DunfordSplit d = dunford_split(upper2(0.3, 2.0, 0.3), tol);
    EXPECT_LT((d.scalar_part - 0.3 * CMatrix::Identity(2, 2)).norm(), 1e-15);
    EXPECT_LT((d.nilpotent_part - upper2(0.0, 2.0, 0.0)).norm(), 1e-15);
  }
  {
    CMatrix a = CMatrix::Zero(2, 2);
    a.diagonal() << 1.0, 2.0;
    const DunfordSplit d = dunford_split(a, tol);
    EXPECT_EQ(d.scalar_part, a);
    EXPECT_EQ(d.nilpotent_part, CMatrix::Zero(2, 2));
  }
}

TEST(Dunford, SemisimpleInputIsExact) {
  const Tolerances tol;
  Rng rng(53);
  for (int trial = 0; trial < 20; ++trial) {
    const CMatrix a = gaussian(5, 5, rng);
    const DunfordSplit d = dunford_split(a, tol);
    EXPECT_EQ(d.scalar_part, a);
    EXPECT_TRUE((d.nilpotent_part.array() == Complex(0.0)).all());
  }
}

TEST(Dunford, DefectiveProperties) {
  const Tolerances tol;
  Rng rng(59);
  for (int trial = 0; trial < 30; ++trial) {
    const JordanSpec spec = random_jordan_spec(6, rng);
    const CMatrix x = random_with_cond(spec.dim(), 5.0, rng);
    const CMatrix a = x * jordan_matrix(spec) * x.inverse();
    const DunfordSplit d = dunford_split(a, tol);
    const CMatrix& s = d.scalar_part;
    const CMatrix& r = d.nilpotent_part;
    const double scale = std::max(1.0, op_norm(a));
    EXPECT_LT((s * r - r * s).norm() / (scale * scale), 1e-9) << trial;
    CMatrix rp = CMatrix::Identity(spec.dim(), spec.dim());
    for (int k = 0; k < spec.dim(); ++k) rp = rp * r;
    EXPECT_LT(rp.norm() / std::pow(scale, spec.dim()), 1e-9) << trial;
    // Oracle S = X diag(eigenvalue per block) X^-1.
    CMatrix want = CMatrix::Zero(spec.dim(), spec.dim());
    for (std::size_t k = 0; k < spec.sizes.size(); ++k) want += spec.eigenvalues[k] * block_selector(spec, k);
    want = x * want * x.inverse();
    EXPECT_LT((s - want).norm() / scale, 1e-8) << trial;
  }
}

TEST(BruteSearch, FindsNothingOnJordanBlockAndSomethingOtherwise) {
  const Tolerances tol;
  EXPECT_TRUE(brute_idempotent_search(jordan_block(3, 1.0), 20, tol, 7).empty());
  const auto found = brute_idempotent_search(upper2(1.0, 1.0, 2.0), 20, tol, 7);
  ASSERT_FALSE(found.empty());
  for (const CMatrix& p : found) {
    EXPECT_LT((p * p - p).norm(), 1e-8);
    const CMatrix a = upper2(1.0, 1.0, 2.0);
    EXPECT_LT((p * a - a * p).norm(), 1e-8);
  }
  EXPECT_THROW(brute_idempotent_search(CMatrix::Identity(7, 7), 1, tol), Error);
}

}  // namespace
}  // namespace sidi
