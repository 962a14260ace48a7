#include <gtest/gtest.h>

#include <cmath>

#include "sidi/commutant.hpp"
#include "sidi/field.hpp"
#include "test_support.hpp"

namespace sidi {
namespace {

using namespace sidi::testing;

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no sidi::Error thrown";
  return ErrorCode::InvalidArgument;
}

PartitionedSpace indexed_space(int n, int dim) {
  std::vector<SamplePoint> pts;
  for (int i = 1; i <= n; ++i) pts.push_back({std::to_string(i), 1.0, dim});
  return PartitionedSpace(pts);
}

OperatorField ex21_field(int n) {
  std::vector<CMatrix> fibers;
  for (int i = 1; i <= n; ++i) fibers.push_back(ex21_fiber(i));
  return OperatorField(indexed_space(n, 2), fibers);
}

TEST(PartitionedSpace, Validation) {
  EXPECT_EQ(code_of([] { PartitionedSpace({}); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { PartitionedSpace({{"a", 0.0, 1}}); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { PartitionedSpace({{"a", 1.0, 0}}); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { PartitionedSpace({{"a", 1.0, 1}, {"a", 1.0, 2}}); }),
            ErrorCode::InvalidArgument);
  const PartitionedSpace s({{"a", 0.5, 1}, {"b", 0.25, 2}, {"c", 0.25, 1}});
  EXPECT_EQ(s.total_dim(), 4);
  EXPECT_EQ(s.index_of("b"), 1u);
  EXPECT_FALSE(s.index_of("z").has_value());
  const auto strata = s.strata();
  EXPECT_EQ(strata.at(1), (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(strata.at(2), (std::vector<std::size_t>{1}));
}

TEST(OperatorField, Validation) {
  const PartitionedSpace s({{"a", 1.0, 2}});
  EXPECT_EQ(code_of([&] { OperatorField(s, {}); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([&] { OperatorField(s, {CMatrix::Identity(3, 3)}); }), ErrorCode::InvalidArgument);
  CMatrix bad = CMatrix::Identity(2, 2);
  bad(0, 1) = Complex(INFINITY, 0.0);
  EXPECT_EQ(code_of([&] { OperatorField(s, {bad}); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([&] { IdempotentField(s, {2.0 * CMatrix::Identity(2, 2)}, Tolerances{}); }),
            ErrorCode::NotIdempotent);
}

TEST(FieldNorm, EqualsAssembledNorm) {
  Rng rng(61);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<SamplePoint> pts;
    std::vector<CMatrix> fibers;
    const int n = 1 + trial % 7;
    for (int i = 0; i < n; ++i) {
      const int d = 1 + static_cast<int>(rng() % 4);
      pts.push_back({"p" + std::to_string(i), 1.0, d});
      fibers.push_back(gaussian(d, d, rng));
    }
    const OperatorField f(PartitionedSpace(pts), fibers);
    const double want = Eigen::JacobiSVD<CMatrix>(assemble(f)).singularValues()(0);
    EXPECT_NEAR(field_norm(f), want, 1e-13 * want);
  }
}

TEST(Assemble, TooLarge) {
  const OperatorField f(PartitionedSpace({{"big", 1.0, kMaxAssembledDim + 1}}),
                        {CMatrix::Identity(kMaxAssembledDim + 1, kMaxAssembledDim + 1)});
  EXPECT_EQ(code_of([&] { assemble(f); }), ErrorCode::TooLarge);
}

TEST(CommutesWithDiagonal, BlockDiagonalOnly) {
  const OperatorField f = ex21_field(3);
  const CMatrix q = assemble(f);
  EXPECT_TRUE(commutes_with_diagonal(q, f, Tolerances{}));
  CMatrix coupled = q;
  coupled(0, 3) = 1e-3;
  EXPECT_FALSE(commutes_with_diagonal(coupled, f, Tolerances{}));
  EXPECT_EQ(code_of([&] { commutes_with_diagonal(CMatrix::Identity(2, 2), f, Tolerances{}); }),
            ErrorCode::InvalidArgument);
}

TEST(FieldBound, RieszFamilyOfFifteenFibers) {
  // Fiber i's positive-eigenvalue idempotent has norm sqrt(1 + (2i/3)^2);
  // at i = 15 that is sqrt(101).
  const Tolerances tol;
  const OperatorField f = ex21_field(15);
  std::vector<CMatrix> pos, neg;
  for (const CMatrix& a : f.fibers()) {
    const auto parts = riesz_idempotents(a, tol);
    neg.push_back(parts[0]);
    pos.push_back(parts[1]);
  }
  const std::vector<IdempotentField> family{IdempotentField(f.space(), pos, tol),
                                            IdempotentField(f.space(), neg, tol)};
  EXPECT_NEAR(field_bound(family), std::sqrt(101.0), 1e-12);
  EXPECT_EQ(field_bound({}), 0.0);
  const std::vector<IdempotentField> mixed{family[0],
                                           IdempotentField(indexed_space(1, 2), {pos[0]}, tol)};
  EXPECT_EQ(code_of([&] { field_bound(mixed); }), ErrorCode::InvalidArgument);
}

TEST(Pointwise, JoinMeetComplement) {
  const Tolerances tol;
  const OperatorField f = ex21_field(4);
  std::vector<CMatrix> pos;
  for (const CMatrix& a : f.fibers()) pos.push_back(riesz_idempotents(a, tol)[1]);
  const IdempotentField p(f.space(), pos, tol);
  const IdempotentField c = pointwise_complement(p, tol);
  const IdempotentField j = pointwise_join(p, c, tol);
  const IdempotentField m = pointwise_meet(p, c, tol);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_LT((j.fiber(i) - CMatrix::Identity(2, 2)).norm(), 1e-13);
    EXPECT_LT(m.fiber(i).norm(), 1e-13);
  }
}

TEST(Repartition, ScalarFiberSplitsIntoPieces) {
  const Tolerances tol;
  const OperatorField f(PartitionedSpace({{"a", 0.5, 2}, {"b", 0.5, 1}}),
                        {2.0 * CMatrix::Identity(2, 2), CMatrix::Constant(1, 1, 1.0)});
  const FiberSplit split{0, {1, 1}, CMatrix::Identity(2, 2)};
  const OperatorField g = repartition(f, std::span(&split, 1), tol);
  ASSERT_EQ(g.size(), 3u);
  EXPECT_EQ(g.space().point(0).label, "a#0");
  EXPECT_EQ(g.space().point(1).label, "a#1");
  EXPECT_EQ(g.space().point(2).label, "b");
  EXPECT_DOUBLE_EQ(g.space().point(1).weight, 0.5);
  EXPECT_EQ(g.fiber(1)(0, 0), Complex(2.0));
}

TEST(Repartition, JordanBlockCannotSplit) {
  const Tolerances tol;
  const OperatorField f(PartitionedSpace({{"j", 1.0, 2}}), {jordan_block(2, 0.0)});
  const FiberSplit split{0, {1, 1}, CMatrix::Identity(2, 2)};
  EXPECT_EQ(code_of([&] { repartition(f, std::span(&split, 1), tol); }),
            ErrorCode::NotBlockDiagonalizable);
  const FiberSplit wrong_dim{0, {1}, CMatrix::Identity(2, 2)};
  EXPECT_EQ(code_of([&] { repartition(f, std::span(&wrong_dim, 1), tol); }),
            ErrorCode::InvalidArgument);
}

TEST(Repartition, SimilarityDiagonalizesDistinctEigenvalues) {
  const Tolerances tol;
  const OperatorField f = ex21_field(2);
  std::vector<FiberSplit> splits;
  for (std::size_t i = 0; i < 2; ++i) {
    Eigen::ComplexEigenSolver<CMatrix> es(f.fiber(i));
    splits.push_back({i, {1, 1}, es.eigenvectors().inverse()});
  }
  const OperatorField g = repartition(f, splits, tol);
  ASSERT_EQ(g.size(), 4u);
  EXPECT_EQ(g.space().point(3).label, "2#1");
  for (const CMatrix& a : g.fibers()) EXPECT_EQ(a.rows(), 1);
}

TEST(ConjugateField, AppliesSimilarityPointwise) {
  const Tolerances tol;
  Rng rng(67);
  const OperatorField f = ex21_field(3);
  std::vector<CMatrix> sims;
  for (int i = 0; i < 3; ++i) sims.push_back(random_with_cond(2, 4.0, rng));
  const OperatorField g = conjugate_field(f, sims, tol);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_LT((g.fiber(i) * sims[i] - sims[i] * f.fiber(i)).norm(), 1e-13);
  }
  EXPECT_EQ(code_of([&] { conjugate_field(f, std::span(sims.data(), 2), tol); }),
            ErrorCode::InvalidArgument);
}

}  // namespace
}  // namespace sidi
