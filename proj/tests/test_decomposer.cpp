#include <gtest/gtest.h>

#include <cmath>

#include "sidi/decomposer.hpp"
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

OperatorField ex21(int n) {
  ExampleParams p;
  p.fibers = n;
  return build_example(ExampleName::Ex21, p);
}

OperatorField single(const CMatrix& a, const std::string& label = "x") {
  return OperatorField(PartitionedSpace({{label, 1.0, static_cast<int>(a.rows())}}), {a});
}

// Largest central norm of ex2.1 with n fibers: sqrt(1 + (2n/3)^2).
double ex21_central(int n) { return std::sqrt(1.0 + std::pow(2.0 * n / 3.0, 2)); }

TEST(Verdict, NamesAndExitCodes) {
  EXPECT_EQ(to_string(Verdict::Decomposable), "DECOMPOSABLE");
  EXPECT_EQ(verdict_from_string("NOT_DECOMPOSABLE_WITHIN_BOUND"), Verdict::NotDecomposableWithinBound);
  EXPECT_EQ(code_of([] { verdict_from_string("MAYBE"); }), ErrorCode::MalformedCertificate);
  EXPECT_EQ(exit_code(Verdict::Decomposable), 0);
  EXPECT_EQ(exit_code(Verdict::NotDecomposableWithinBound), 1);
  EXPECT_EQ(exit_code(Verdict::Inconclusive), 3);
}

TEST(AnalyzeFiber, SmallGapGivesLargeCentralNorm) {
  // [[l, 1], [0, -l/2]] at l = 0.01: idempotent [[1, 1/0.015], [0, 0]].
  CMatrix a(2, 2);
  a << 0.01, 1.0, 0.0, -0.005;
  const FiberReport r = analyze_fiber(a, Tolerances{}, "0.01");
  EXPECT_EQ(r.label, "0.01");
  EXPECT_FALSE(r.si);
  EXPECT_FALSE(r.ill_conditioned);
  ASSERT_EQ(r.central.size(), 2u);
  const double want = std::sqrt(1.0 + 1.0 / (0.015 * 0.015));
  EXPECT_NEAR(r.max_central_norm, want, 1e-12 * want);
  EXPECT_NEAR(want, 66.6742, 1e-4);
}

TEST(AnalyzeFiber, FifthFiberIdempotent) {
  const FiberReport r = analyze_fiber(ex21_fiber(5), Tolerances{});
  ASSERT_EQ(r.central.size(), 2u);
  CMatrix want(2, 2);
  want << 1.0, 10.0 / 3.0, 0.0, 0.0;
  EXPECT_LT(rel_err(r.central[1].projector, want), 1e-14);
  EXPECT_NEAR(r.central[1].norm, ex21_central(5), 1e-13);
}

TEST(AnalyzeFiber, SingleJordanBlockIsSI) {
  const FiberReport r = analyze_fiber(jordan_block(3, 2.0), Tolerances{});
  EXPECT_TRUE(r.si);
  EXPECT_EQ(r.max_central_norm, 1.0);
  ASSERT_EQ(r.jordan.clusters.size(), 1u);
  EXPECT_EQ(r.jordan.clusters[0].block_sizes, std::vector<int>{3});
}

TEST(AnalyzeFiber, AmbiguousGapIsIllConditioned) {
  CMatrix a = CMatrix::Zero(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = 1.0 + 1.5e-8;
  const FiberReport r = analyze_fiber(a, Tolerances{});
  EXPECT_TRUE(r.ill_conditioned);
  EXPECT_FALSE(r.notes.empty());
  const Certificate c = decide(single(a), 10.0, Tolerances{});
  EXPECT_EQ(c.verdict, Verdict::Inconclusive);
  EXPECT_EQ(c.diagnostics.ill_conditioned, std::vector<std::string>{"x"});
}

TEST(Decide, RefusalBoundaryBetweenFourteenAndFifteen) {
  const Tolerances tol;
  const Certificate c14 = decide(ex21(14), 10.0, tol);
  EXPECT_EQ(c14.verdict, Verdict::Decomposable);
  EXPECT_NEAR(c14.diagnostics.central_bound, ex21_central(14), 1e-12);
  EXPECT_TRUE(verify_certificate(ex21(14), c14, tol).ok);

  const Certificate c15 = decide(ex21(15), 10.0, tol);
  ASSERT_EQ(c15.verdict, Verdict::NotDecomposableWithinBound);
  ASSERT_TRUE(c15.witness.has_value());
  EXPECT_EQ(c15.witness->label, "15");
  EXPECT_NEAR(c15.witness->norm, std::sqrt(101.0), 1e-12);
  const VerificationReport v = verify_certificate(ex21(15), c15, tol);
  EXPECT_TRUE(v.ok) << (v.failures.empty() ? "" : v.failures[0]);
}

TEST(Decide, DefaultBoundAndInvalidBound) {
  const OperatorField f = ex21(4);
  const Certificate c = decide(f, std::nullopt, Tolerances{});
  EXPECT_DOUBLE_EQ(c.bound_used, 10.0 * std::max(1.0, field_norm(f)));
  EXPECT_EQ(code_of([&] { decide(f, 0.5, Tolerances{}); }), ErrorCode::InvalidArgument);
}

TEST(Decide, VerdictIsMonotoneInBound) {
  // Refinement of 2x2 fibers with distinct eigenvalues gives back the central
  // idempotents, so the switch happens exactly at the central bound.
  const Tolerances tol;
  const OperatorField f = ex21(20);
  const double threshold = ex21_central(20);
  for (double b : {1.0, 5.0, 13.0, 13.5, 20.0, 1e3}) {
    const Verdict v = decide(f, b, tol).verdict;
    EXPECT_EQ(v, b < threshold ? Verdict::NotDecomposableWithinBound : Verdict::Decomposable) << b;
  }
}

TEST(Decide, PhiFamilySplitsScalarFibersOnly) {
  const Tolerances tol;
  const OperatorField f = build_example(ExampleName::Prop43, ExampleParams{});
  const Certificate c = decide(f, 10.0, tol);
  ASSERT_EQ(c.verdict, Verdict::Decomposable);
  ASSERT_TRUE(c.si_field.has_value());
  // phi = 1 on (0, 0.5]: 50 Jordan fibers stay whole, 50 scalar fibers split.
  EXPECT_EQ(c.si_field->size(), 150u);
  EXPECT_EQ(c.si_field->space().point(0).label, "0.01");
  EXPECT_TRUE(c.si_field->space().index_of("1#1").has_value());
  EXPECT_TRUE(verify_certificate(f, c, tol).ok);
}

TEST(Decide, ConstantJordanFieldIsDecomposableWithTrivialAtoms) {
  ExampleParams p;
  p.fibers = 5;
  const Certificate c = decide(build_example(ExampleName::ConstJ2, p), 2.0, Tolerances{});
  ASSERT_EQ(c.verdict, Verdict::Decomposable);
  for (const auto& atoms : c.atoms) {
    ASSERT_EQ(atoms.size(), 1u);
    EXPECT_EQ(atoms[0], CMatrix::Identity(2, 2));
  }
}

TEST(Decide, InconclusiveWhenRefinementExceedsBound) {
  // J_2 + J_2 under a similarity has central bound 1, but the images of the
  // two chain generators need not be orthogonal, so the chain atoms can be
  // large.  A bound between the two leaves the question open.
  const Tolerances tol;
  Rng rng(71);
  bool found = false;
  for (int trial = 0; trial < 50 && !found; ++trial) {
    const CMatrix blocks[] = {jordan_block(2, 0.0), jordan_block(2, 0.0)};
    const CMatrix x = random_with_cond(4, 1e3, rng);
    const OperatorField f = single(x * direct_sum(blocks) * x.inverse());
    const Certificate wide = decide(f, 1e8, tol);
    if (wide.verdict != Verdict::Decomposable || !wide.diagnostics.refined_bound) continue;
    const double central = wide.diagnostics.central_bound;
    const double refined = *wide.diagnostics.refined_bound;
    if (refined <= 1.05 * central) continue;
    found = true;
    const Certificate c = decide(f, 0.5 * (central + refined), tol);
    EXPECT_EQ(c.verdict, Verdict::Inconclusive);
    EXPECT_EQ(exit_code(c.verdict), 3);
  }
  EXPECT_TRUE(found);
}

TEST(Verify, TamperedAtomFails) {
  const Tolerances tol;
  const OperatorField f = ex21(5);
  Certificate c = decide(f, 10.0, tol);
  ASSERT_EQ(c.verdict, Verdict::Decomposable);
  c.atoms[2][0](0, 1) += 1e-3;
  const VerificationReport v = verify_certificate(f, c, tol);
  EXPECT_FALSE(v.ok);
  ASSERT_FALSE(v.failures.empty());
  EXPECT_NE(v.failures[0].find("@3"), std::string::npos) << v.failures[0];
}

TEST(Verify, TamperedWitnessFails) {
  const Tolerances tol;
  const OperatorField f = ex21(15);
  Certificate c = decide(f, 10.0, tol);
  c.bound_used = 20.0;
  EXPECT_FALSE(verify_certificate(f, c, tol).ok);
}

TEST(Verify, MismatchedFieldIsMalformed) {
  const Tolerances tol;
  const Certificate c = decide(ex21(5), 10.0, tol);
  EXPECT_EQ(code_of([&] { verify_certificate(ex21(6), c, tol); }), ErrorCode::MalformedCertificate);
  Certificate missing = c;
  missing.orthogonalizers.clear();
  EXPECT_EQ(code_of([&] { verify_certificate(ex21(5), missing, tol); }),
            ErrorCode::MalformedCertificate);
}

TEST(Transport, CertificateFollowsSimilarity) {
  const Tolerances tol;
  Rng rng(73);
  const OperatorField f = ex21(6);
  const Certificate c = decide(f, 20.0, tol);
  ASSERT_EQ(c.verdict, Verdict::Decomposable);
  std::vector<CMatrix> sims;
  for (std::size_t i = 0; i < f.size(); ++i) sims.push_back(random_with_cond(2, 3.0, rng));
  const OperatorField g = conjugate_field(f, sims, tol);
  const Certificate t = transport_certificate(c, sims, 1e4, tol);
  EXPECT_EQ(t.bound_used, 1e4);
  const VerificationReport v = verify_certificate(g, t, tol);
  EXPECT_TRUE(v.ok) << (v.failures.empty() ? "" : v.failures[0]);
}

TEST(Transport, WitnessIsConjugated) {
  const Tolerances tol;
  Rng rng(79);
  const OperatorField f = ex21(15);
  const Certificate c = decide(f, 5.0, tol);
  ASSERT_EQ(c.verdict, Verdict::NotDecomposableWithinBound);
  std::vector<CMatrix> sims(f.size(), CMatrix::Identity(2, 2));
  sims[14] = random_with_cond(2, 2.0, rng);
  const Certificate t = transport_certificate(c, sims, 5.0, tol);
  ASSERT_TRUE(t.witness.has_value());
  EXPECT_TRUE(verify_certificate(conjugate_field(f, sims, tol), t, tol).ok);
}

TEST(Examples, ParseNamesAndParams) {
  EXPECT_EQ(parse_example_name("ex2_1"), ExampleName::Ex21);
  EXPECT_EQ(parse_example_name("const-j2"), ExampleName::ConstJ2);
  EXPECT_EQ(code_of([] { parse_example_name("ex9.9"); }), ErrorCode::UnknownExample);
  ExampleParams p;
  p.phi = "const:2";
  EXPECT_EQ(code_of([&] { build_example(ExampleName::Ex21, p); }), ErrorCode::BadParams);
  EXPECT_EQ(code_of([&] { build_example(ExampleName::Lemma45, p); }), ErrorCode::BadParams);
  p.phi = "indicator:0.5,0.1";
  EXPECT_EQ(code_of([&] { build_example(ExampleName::Prop43, p); }), ErrorCode::BadParams);
  p.phi = "wave:1,2";
  EXPECT_EQ(code_of([&] { build_example(ExampleName::Prop43, p); }), ErrorCode::BadParams);
  ExampleParams g;
  g.grid = 0;
  EXPECT_EQ(code_of([&] { build_example(ExampleName::Ex22, g); }), ErrorCode::BadParams);
  ExampleParams s;
  s.samples = {1.0, 2.0};
  s.sample_count = 3;
  EXPECT_EQ(code_of([&] { build_example(ExampleName::Normal, s); }), ErrorCode::BadParams);
}

TEST(Examples, Shapes) {
  EXPECT_EQ(build_example(ExampleName::Ex21, ExampleParams{}).size(), 20u);
  const OperatorField g = build_example(ExampleName::Ex22, ExampleParams{});
  ASSERT_EQ(g.size(), 100u);
  EXPECT_EQ(g.space().point(99).label, "1");
  EXPECT_DOUBLE_EQ(g.space().point(0).weight, 0.01);
  ExampleParams p;
  p.phi = "linear:1,2";
  p.grid = 4;
  const OperatorField lin = build_example(ExampleName::Prop43, p);
  EXPECT_EQ(lin.fiber(1)(0, 1), Complex(2.0));  // 1 + 2 * 0.5
  const PhiSpec ind = PhiSpec::parse("indicator:0,0.5");
  EXPECT_EQ(ind(0.5), 1.0);
  EXPECT_EQ(ind(0.0), 0.0);
  EXPECT_EQ(ind(0.51), 0.0);
}

TEST(Dunford, PhiFamilyFibers) {
  // [[l, phi], [0, l]] = l I + [[0, phi], [0, 0]].
  const Tolerances tol;
  ExampleParams p;
  p.phi = "linear:0.5,3";
  p.grid = 20;
  const OperatorField f = build_example(ExampleName::Prop43, p);
  for (const CMatrix& a : f.fibers()) {
    const DunfordSplit d = dunford_split(a, tol);
    EXPECT_LT((d.scalar_part - a(0, 0) * CMatrix::Identity(2, 2)).norm(), 1e-15);
    EXPECT_LT((d.nilpotent_part - (a - a(0, 0) * CMatrix::Identity(2, 2))).norm(), 1e-15);
  }
}

TEST(Scan, GrowthAndBoundedFamilies) {
  const Tolerances tol;
  const int params[] = {5, 10, 20, 40};
  const TrendReport ex = scan_family(family_builder(ExampleName::Ex21), params, tol);
  ASSERT_EQ(ex.norms.size(), 4u);
  EXPECT_NEAR(ex.norms[3], ex21_central(40), 1e-11);
  EXPECT_NEAR(ex.slope, 1.0, 0.05);
  EXPECT_TRUE(ex.divergent);
  const TrendReport j = scan_family(family_builder(ExampleName::ConstJ2), params, tol);
  EXPECT_EQ(j.slope, 0.0);
  EXPECT_EQ(j.r_squared, 1.0);
  EXPECT_FALSE(j.divergent);
  const int one[] = {5, 5};
  EXPECT_EQ(code_of([&] { scan_family(family_builder(ExampleName::Ex21), one, tol); }),
            ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { family_builder(ExampleName::Prop43); }), ErrorCode::UnknownExample);
}

}  // namespace
}  // namespace sidi
