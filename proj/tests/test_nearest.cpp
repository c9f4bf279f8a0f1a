#include <gtest/gtest.h>

#include <numbers>

#include "normjac/nearest.hpp"
#include "test_utils.hpp"

using namespace normjac;
using namespace normjac::testing;

namespace {

ComplexMatrix random_complex(std::size_t m, CounterRng& rng) {
  ComplexMatrix B(m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) B(i, j) = {rng.normal(), rng.normal()};
  return B;
}

double unitarity_defect(const ComplexMatrix& U) {
  return (U.adjoint() * U - ComplexMatrix::identity(U.size())).frobenius();
}

// Realification [[Re U, -Im U], [Im U, Re U]] of a random unitary, i.e. a random element of OSp(2m).
DenseMatrix random_osp(std::size_t m, CounterRng& rng) {
  const ComplexMatrix U = complex_polar(random_complex(m, rng)).U;
  DenseMatrix R(2 * m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      R(i, j) = R(m + i, m + j) = U(i, j).real();
      R(i, m + j) = -U(i, j).imag();
      R(m + i, j) = U(i, j).imag();
    }
  return R;
}

double osp_defect(const DenseMatrix& R) {
  const DenseMatrix J = symplectic_unit(R.size());
  return orthogonality_residual(R) + frobenius_norm(R * J - J * R);
}

}  // namespace

TEST(Polar, IdentityAndScaledIdentity) {
  const PolarResult a = complex_polar(ComplexMatrix::identity(3));
  EXPECT_LT((a.U - ComplexMatrix::identity(3)).frobenius(), 1e-15);
  EXPECT_LT(a.hermitian_gap, 1e-15);
  const PolarResult b = complex_polar(2.0 * ComplexMatrix::identity(2));
  EXPECT_LT((b.U - ComplexMatrix::identity(2)).frobenius(), 1e-15);
  EXPECT_NEAR(b.hermitian_gap, std::sqrt(2.0), 1e-15);
  EXPECT_FALSE(b.non_unique);
}

TEST(Polar, FactorisesRandomMatrices) {
  CounterRng rng(61);
  for (int t = 0; t < 100; ++t) {
    const ComplexMatrix B = random_complex(3, rng);
    const PolarResult p = complex_polar(B);
    EXPECT_LT(unitarity_defect(p.U), 1e-12);
    ComplexMatrix H = p.U.adjoint() * B;
    EXPECT_LT((H - H.adjoint()).frobenius(), 1e-12 * B.frobenius());
    EXPECT_LT((B - p.U * H).frobenius(), 1e-12 * B.frobenius());
  }
}

TEST(Polar, ScalarCaseMatchesPhaseGrid) {
  CounterRng rng(62);
  for (int t = 0; t < 20; ++t) {
    const cplx b(rng.normal(), rng.normal());
    ComplexMatrix B(1);
    B(0, 0) = b;
    const PolarResult p = complex_polar(B);
    double best = 1e300, best_phase = 0.0;
    const int N = 200000;
    for (int k = 0; k < N; ++k) {
      const double ph = 2.0 * std::numbers::pi * k / N;
      const double d = std::abs(b - std::polar(1.0, ph));
      if (d < best) {
        best = d;
        best_phase = ph;
      }
    }
    EXPECT_LT(std::abs(p.U(0, 0) - std::polar(1.0, best_phase)), 1e-4);
    EXPECT_NEAR(std::abs(b - p.U(0, 0)), best, 1e-6);
  }
}

TEST(Polar, SingularInputIsFlagged) {
  ComplexMatrix B(2);
  B(0, 0) = {1.0, 1.0};
  B(0, 1) = {2.0, 2.0};
  B(1, 0) = {0.5, 0.5};
  B(1, 1) = {1.0, 1.0};
  const PolarResult p = complex_polar(B);
  EXPECT_TRUE(p.non_unique);
  EXPECT_TRUE(p.via_svd);
  EXPECT_LT(unitarity_defect(p.U), 1e-12);
  const PolarResult z = complex_polar(ComplexMatrix(3));
  EXPECT_TRUE(z.non_unique);
  EXPECT_LT(unitarity_defect(z.U), 1e-12);
}

TEST(Polar, IllConditionedFallsBackToSvd) {
  CounterRng rng(63);
  ComplexMatrix B = random_complex(3, rng);
  for (std::size_t j = 0; j < 3; ++j) B(2, j) = B(1, j) * 1.0 + 1e-10 * cplx(rng.normal(), 0.0);
  const PolarResult p = complex_polar(B);
  EXPECT_TRUE(p.via_svd);
  EXPECT_LT(unitarity_defect(p.U), 1e-12);
}

TEST(NearestOsp, FixedPointAndScaledIdentity) {
  CounterRng rng(64);
  const DenseMatrix R = random_osp(3, rng);
  const NearestOsp a = nearest_ortho_symplectic(R);
  EXPECT_LT(max_abs_diff(a.R, R), 1e-13);
  EXPECT_LT(a.distance, 1e-13);
  const NearestOsp b = nearest_ortho_symplectic(2.0 * DenseMatrix::identity(2));
  EXPECT_LT(max_abs_diff(b.R, DenseMatrix::identity(2)), 1e-15);
  EXPECT_NEAR(b.distance, std::sqrt(2.0), 1e-15);
  EXPECT_THROW(nearest_ortho_symplectic(DenseMatrix(3)), std::invalid_argument);
}

// OSp(2) is the group of plane rotations.
TEST(NearestOsp, RotationGridOracle) {
  CounterRng rng(65);
  for (int t = 0; t < 10; ++t) {
    const DenseMatrix A = random_matrix(2, rng);
    const NearestOsp r = nearest_ortho_symplectic(A);
    double best = 1e300;
    const int N = 1000000;
    for (int k = 0; k < N; ++k) {
      const double th = 2.0 * std::numbers::pi * k / N, c = std::cos(th), s = std::sin(th);
      const double d = std::pow(A(0, 0) - c, 2) + std::pow(A(0, 1) + s, 2) + std::pow(A(1, 0) - s, 2) +
                       std::pow(A(1, 1) - c, 2);
      best = std::min(best, d);
    }
    EXPECT_NEAR(r.distance, std::sqrt(best), 1e-5);
  }
}

TEST(NearestOsp, DistanceIdentityAndStructure) {
  CounterRng rng(66);
  for (int t = 0; t < 200; ++t) {
    const std::size_t m = 1 + static_cast<std::size_t>(rng.uniform() * 5);
    const DenseMatrix A = random_matrix(2 * m, rng);
    const NearestOsp r = nearest_ortho_symplectic(A);
    EXPECT_LT(osp_defect(r.R), 1e-12);
    const double direct = frobenius_norm(A - r.R);
    EXPECT_NEAR(r.distance * r.distance, direct * direct, 1e-11 * direct * direct);
    // no random ortho-symplectic matrix is closer
    for (int k = 0; k < 5; ++k) EXPECT_GE(frobenius_norm(A - random_osp(m, rng)), direct - 1e-12);
  }
}

TEST(NearestOsp, InvariantUnderOspConjugation) {
  CounterRng rng(67);
  for (int t = 0; t < 50; ++t) {
    const DenseMatrix A = random_matrix(6, rng);
    const DenseMatrix V = random_osp(3, rng);
    const double d1 = nearest_ortho_symplectic(A).distance;
    const double d2 = nearest_ortho_symplectic(V.transposed() * A * V).distance;
    EXPECT_NEAR(d1, d2, 1e-11 * d1);
  }
}

TEST(OspBound, ZeroOnGroupAndScaledIdentity) {
  CounterRng rng(68);
  const OspBounds a = osp_distance_bound(random_osp(4, rng));
  EXPECT_LT(a.squared, 1e-24);
  EXPECT_LT(a.linear, 1e-12);
  // A = 2I: A^T A - I = 3I, A^T J A - J = 3J, AJ - JA = 0
  const OspBounds b = osp_distance_bound(2.0 * DenseMatrix::identity(2));
  EXPECT_NEAR(b.squared, 0.25 * std::pow(6.0 * std::sqrt(2.0), 2), 1e-12);
  EXPECT_NEAR(b.linear, 3.0 * std::sqrt(2.0), 1e-12);
  EXPECT_GE(b.squared, 2.0);
  EXPECT_GE(b.linear, std::sqrt(2.0));
}

TEST(OspBound, NeverBelowDistance) {
  CounterRng rng(69);
  for (int t = 0; t < 500; ++t) {
    const std::size_t m = 1 + static_cast<std::size_t>(rng.uniform() * 4);
    DenseMatrix A = random_matrix(2 * m, rng);
    if (t % 2 == 0) {
      // near the identity, ||A - I||_F <= 0.1
      const double s = rng.uniform(0.0, 0.1) / frobenius_norm(A);
      A = DenseMatrix::identity(2 * m) + s * A;
    }
    const double d = nearest_ortho_symplectic(A).distance;
    const OspBounds b = osp_distance_bound(A);
    EXPECT_GE(b.squared * (1 + 1e-12), d * d);
    EXPECT_GE(b.linear * (1 + 1e-12), d);
  }
}
