#include <gtest/gtest.h>

#include "normjac/genmat.hpp"
#include "test_utils.hpp"

using namespace normjac;
using namespace normjac::testing;

namespace {

double normality_defect(const DenseMatrix& A) {
  const DenseMatrix At = A.transposed();
  return frobenius_norm(A * At - At * A);
}

}  // namespace

TEST(Haar, Orthogonal) {
  for (std::size_t n : {1u, 2u, 7u, 40u}) EXPECT_LT(orthogonality_residual(haar_orthogonal(n, 3)), 1e-13) << n;
}

TEST(Haar, BothSignsInDimensionOne) {
  int plus = 0;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const double q = haar_orthogonal(1, s)(0, 0);
    EXPECT_EQ(std::abs(q), 1.0);
    plus += q > 0;
  }
  // binomial(1000, 1/2): 5 sigma is about 79
  EXPECT_GT(plus, 420);
  EXPECT_LT(plus, 580);
}

TEST(Haar, MomentsMatchTheUniformMeasure) {
  // E tr Q = 0 and E Q_ij^2 = 1/n under Haar measure on O(n)
  const std::size_t n = 8, N = 2000;
  double tr = 0.0, sq = 0.0;
  for (std::uint64_t s = 0; s < N; ++s) {
    const DenseMatrix Q = haar_orthogonal(n, 1000 + s);
    for (std::size_t i = 0; i < n; ++i) tr += Q(i, i);
    sq += Q(0, 1) * Q(0, 1);
  }
  EXPECT_LT(std::abs(tr / N), 0.1);
  EXPECT_NEAR(sq / N, 1.0 / n, 0.02);
}

TEST(Generate, UnitCircleClass) {
  const GroundTruth g = generate({EnsembleClass::Exp1, 30, 1});
  EXPECT_EQ(g.spectrum.pairs.size(), 15u);
  for (const auto& p : g.spectrum.pairs) {
    EXPECT_DOUBLE_EQ(p.radius, 1.0);
    EXPECT_GE(p.phase, 0.0);
    EXPECT_LE(p.phase, std::numbers::pi);
  }
  const GroundTruth odd = generate({EnsembleClass::Exp1, 7, 1});
  ASSERT_EQ(odd.spectrum.reals.size(), 1u);
  EXPECT_EQ(std::abs(odd.spectrum.reals[0]), 1.0);
}

TEST(Generate, ClassComposition) {
  const GroundTruth e3 = generate({EnsembleClass::Exp3, 40, 2});
  EXPECT_EQ(e3.real_count, 12u);
  const GroundTruth e4 = generate({EnsembleClass::Exp4, 40, 2, 0, 0, 2});
  EXPECT_EQ(e4.repeated_pairs, 6u);
  EXPECT_EQ(e4.spectrum.sigma_groups.size(), 2u);
  for (const auto& gr : e4.spectrum.sigma_groups) EXPECT_EQ(gr.size(), 3u);
  const GroundTruth e5 = generate({EnsembleClass::Exp5, 20, 2});
  for (const auto& p : e5.spectrum.pairs) EXPECT_LT(p.phase, 1e-6);
  EXPECT_THROW(generate({EnsembleClass::Exp4, 2, 1}), std::invalid_argument);
}

TEST(Generate, AlphaFamily) {
  const GroundTruth g = generate({EnsembleClass::AlphaFamily, 20, 3, 0.3, 0.3});
  EXPECT_EQ(g.real_count, 6u);
  EXPECT_EQ(g.repeated_pairs, 3u);
  ASSERT_EQ(g.spectrum.sigma_groups.size(), 1u);
  EXPECT_EQ(g.spectrum.sigma_groups[0].size(), 3u);
  EXPECT_EQ(g.spectrum.dimension(), 20u);
  EXPECT_THROW(generate({EnsembleClass::AlphaFamily, 20, 3, 0.7, 0.5}), std::invalid_argument);
  EXPECT_THROW(generate({EnsembleClass::AlphaFamily, 20, 3, -0.1, 0.0}), std::invalid_argument);
}

TEST(Generate, CoverageInstance) {
  const GroundTruth g = generate({EnsembleClass::Fig1, 0, 4});
  EXPECT_EQ(g.A.size(), 26u);
  EXPECT_EQ(g.real_count, 6u);
  EXPECT_EQ(g.spectrum.pairs.size(), 10u);
  EXPECT_EQ(g.repeated_pairs, 3u);
  EXPECT_EQ(g.expected_steps, (std::vector<std::string>{"I.1", "II.1", "II.2", "II.3", "III"}));
  ASSERT_EQ(g.spectrum.sigma_groups.size(), 1u);
}

TEST(Generate, NormalAndConsistent) {
  for (auto cls : {EnsembleClass::Exp1, EnsembleClass::Exp2, EnsembleClass::Exp3, EnsembleClass::Exp4,
                   EnsembleClass::Exp5, EnsembleClass::Fig1}) {
    for (std::size_t n : {5u, 16u, 33u}) {
      const GroundTruth g = generate({cls, n, 7});
      const double nrm = frobenius_norm(g.A);
      EXPECT_LE(normality_defect(g.A), 1e-12 * nrm * nrm) << class_name(cls);
      EXPECT_LT(reconstruction_residual(g.A, g.Q, g.S), 1e-13 * nrm);
      EXPECT_EQ(g.spectrum.dimension(), g.A.size());
      EXPECT_LT(matching_distance(eigenvalues(g.A), g.spectrum.eigenvalues()), 1e-6 * nrm);
    }
  }
}

TEST(Generate, DeterministicInSeed) {
  const GroundTruth a = generate({EnsembleClass::Exp2, 12, 99}), b = generate({EnsembleClass::Exp2, 12, 99});
  const GroundTruth c = generate({EnsembleClass::Exp2, 12, 100});
  EXPECT_EQ(max_abs_diff(a.A, b.A), 0.0);
  EXPECT_GT(max_abs_diff(a.A, c.A), 0.0);
}

TEST(Generate, ClassNamesRoundTrip) {
  for (auto cls : {EnsembleClass::Exp1, EnsembleClass::Exp2, EnsembleClass::Exp3, EnsembleClass::Exp4,
                   EnsembleClass::Exp5, EnsembleClass::AlphaFamily, EnsembleClass::Fig1})
    EXPECT_EQ(parse_class(class_name(cls)), cls);
  EXPECT_FALSE(parse_class("nope"));
}
