#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>

#include "matrix.hpp"
#include "sweep.hpp"

namespace normjac {

// [[c1, s1], [-s1, c1]] * A * [[c2, -s2], [s2, c2]] = diag(d1, d2).
// alpha1 is the minimal angle (|alpha1| <= pi/4); c2 >= 0.
struct TwoByTwoSvd {
  double alpha1 = 0.0, alpha2 = 0.0;
  double c1 = 1.0, s1 = 0.0, c2 = 1.0, s2 = 0.0;
  double d1 = 0.0, d2 = 0.0;
};

inline TwoByTwoSvd two_by_two_svd(double a11, double a12, double a21, double a22) {
  TwoByTwoSvd r;
  const double num = 2.0 * (a21 * a11 + a12 * a22);
  const double den = a11 * a11 + a12 * a12 - a22 * a22 - a21 * a21;
  double two_alpha = 0.0;
  if (den > 0.0)
    two_alpha = std::atan2(num, den);
  else if (den < 0.0)
    two_alpha = std::atan2(-num, -den);
  else if (num != 0.0)
    two_alpha = std::copysign(std::numbers::pi / 2.0, num);
  r.alpha1 = 0.5 * two_alpha;
  r.c1 = std::cos(r.alpha1);
  r.s1 = std::sin(r.alpha1);

  const double p = r.c1 * a11 + r.s1 * a21, q = r.c1 * a12 + r.s1 * a22;
  const double u = -r.s1 * a11 + r.c1 * a21, v = -r.s1 * a12 + r.c1 * a22;
  double x = p, y = q;
  if (std::hypot(u, v) > std::hypot(p, q)) {
    x = v;
    y = -u;
  }
  const double h = std::hypot(x, y);
  if (h > 0.0) {
    r.c2 = x / h;
    r.s2 = y / h;
    if (r.c2 < 0.0) {
      r.c2 = -r.c2;
      r.s2 = -r.s2;
    }
  }
  r.alpha2 = std::atan2(r.s2, r.c2);
  r.d1 = p * r.c2 + q * r.s2;
  r.d2 = v * r.c2 - u * r.s2;
  return r;
}

struct RotationPair {
  GivensRotation first;
  GivensRotation second;
};

// G^T Omega G = [[0,-sigma1,0,0],[sigma1,0,0,0],[0,0,0,-sigma2],[0,0,sigma2,0]].
struct SkewSchur4 {
  Fixed<4> G;
  double sigma1 = 0.0, sigma2 = 0.0;
  RotationPair pair1, pair2;
  std::array<double, 4> signs{1.0, 1.0, 1.0, 1.0};
};

namespace detail {

inline void embed_rotation(Fixed<4>& G, std::size_t i, std::size_t j, double c, double s) {
  G(i, i) = c;
  G(j, j) = c;
  G(i, j) = -s;
  G(j, i) = s;
}

inline double sign_or_one(double x) { return x < 0.0 ? -1.0 : 1.0; }

template <std::size_t K>
void require_skew(const Fixed<K>& W, const char* who) {
  double asym = 0.0;
  for (std::size_t i = 0; i < K; ++i)
    for (std::size_t j = 0; j <= i; ++j) asym += (W(i, j) + W(j, i)) * (W(i, j) + W(j, i));
  if (std::sqrt(asym) > 1e-13 * W.frobenius())
    throw std::invalid_argument(std::string(who) + ": input is not skew-symmetric");
}

}  // namespace detail

// Closed-form real Schur form of a 4x4 skew-symmetric block, built from two
// simultaneous pairs of 2x2 SVDs.
inline SkewSchur4 schur_skew_4x4(const Fixed<4>& W) {
  detail::require_skew(W, "schur_skew_4x4");
  SkewSchur4 out;

  const TwoByTwoSvd s1 = two_by_two_svd(W(1, 0), -W(2, 1), W(3, 0), W(3, 2));
  Fixed<4> G1 = Fixed<4>::identity();
  detail::embed_rotation(G1, 1, 3, s1.c1, s1.s1);
  detail::embed_rotation(G1, 0, 2, s1.c2, s1.s2);
  out.pair1 = {{1, 3, s1.c1, s1.s1}, {0, 2, s1.c2, s1.s2}};
  const Fixed<4> W1 = G1.transposed() * W * G1;

  const TwoByTwoSvd s2 = two_by_two_svd(W1(1, 0), W1(1, 3), W1(2, 0), W1(2, 3));
  Fixed<4> G2 = Fixed<4>::identity();
  detail::embed_rotation(G2, 1, 2, s2.c1, s2.s1);
  detail::embed_rotation(G2, 0, 3, s2.c2, s2.s2);
  out.pair2 = {{1, 2, s2.c1, s2.s1}, {0, 3, s2.c2, s2.s2}};
  const Fixed<4> W2 = G2.transposed() * W1 * G2;

  out.signs = {1.0, detail::sign_or_one(W2(1, 0)), 1.0, detail::sign_or_one(W2(3, 2))};
  Fixed<4> G = G1 * G2;
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 4; ++c) G(r, c) *= out.signs[c];
  out.G = G;
  out.sigma1 = std::abs(W2(1, 0));
  out.sigma2 = std::abs(W2(3, 2));
  return out;
}

// G^T Omega G = [[0,-sigma,0],[sigma,0,0],[0,0,0]].
struct SkewSchur3 {
  Fixed<3> G;
  double sigma = 0.0;
};

inline SkewSchur3 schur_skew_3x3(const Fixed<3>& W) {
  detail::require_skew(W, "schur_skew_3x3");
  auto rot = [](std::size_t i, std::size_t j, double c, double s) {
    Fixed<3> g = Fixed<3>::identity();
    g(i, i) = c;
    g(j, j) = c;
    g(i, j) = -s;
    g(j, i) = s;
    return g;
  };
  double c1 = 1.0, s1 = 0.0;
  const double r1 = std::hypot(W(1, 0), W(2, 0));
  if (r1 > 0.0) {
    c1 = W(1, 0) / r1;
    s1 = W(2, 0) / r1;
  }
  const Fixed<3> G1 = rot(1, 2, c1, s1);
  const Fixed<3> W1 = G1.transposed() * W * G1;
  double c2 = 1.0, s2 = 0.0;
  const double r2 = std::hypot(W1(1, 0), W1(2, 1));
  if (r2 > 0.0) {
    c2 = W1(1, 0) / r2;
    s2 = -W1(2, 1) / r2;
  }
  const Fixed<3> G2 = rot(0, 2, c2, s2);
  Fixed<3> G = G1 * G2;
  const Fixed<3> W2 = G.transposed() * W * G;
  if (W2(1, 0) < 0.0)
    for (std::size_t r = 0; r < 3; ++r) G(r, 1) = -G(r, 1);
  return {G, std::abs(W2(1, 0))};
}

namespace detail {

// Among the rotations G * U with U commuting with J (+) J (a 2x2 unitary acting on
// both slots at once), returns the one closest to the identity. When the two sigmas
// of a 4x4 block coincide, every such G * U solves the block equally well, and the
// closed form otherwise picks a large slot-mixing rotation driven by rounding noise.
inline Fixed<4> least_mixing(const Fixed<4>& G) {
  using C = std::complex<double>;
  // M: projection of G^T onto the matrices commuting with J (+) J, as a complex 2x2.
  C M[2][2];
  for (std::size_t k = 0; k < 2; ++k)
    for (std::size_t l = 0; l < 2; ++l) {
      const double b00 = G(2 * l, 2 * k), b01 = G(2 * l + 1, 2 * k);
      const double b10 = G(2 * l, 2 * k + 1), b11 = G(2 * l + 1, 2 * k + 1);
      M[k][l] = C(0.5 * (b00 + b11), 0.5 * (b10 - b01));
    }
  // U = M (M^* M)^{-1/2}, with the closed-form square root of a 2x2 Hermitian matrix.
  const double h00 = std::norm(M[0][0]) + std::norm(M[1][0]);
  const double h11 = std::norm(M[0][1]) + std::norm(M[1][1]);
  const C h01 = std::conj(M[0][0]) * M[0][1] + std::conj(M[1][0]) * M[1][1];
  const double det = h00 * h11 - std::norm(h01);
  if (!(det > 1e-12)) return G;
  const double sd = std::sqrt(det), t = std::sqrt(h00 + h11 + 2.0 * sd);
  const double s00 = (h00 + sd) / t, s11 = (h11 + sd) / t;
  const C s01 = h01 / t;
  const double sdet = s00 * s11 - std::norm(s01);
  const C i00 = s11 / sdet, i11 = s00 / sdet, i01 = -s01 / sdet, i10 = -std::conj(s01) / sdet;
  Fixed<4> R;
  for (std::size_t k = 0; k < 2; ++k)
    for (std::size_t l = 0; l < 2; ++l) {
      const C u = l == 0 ? M[k][0] * i00 + M[k][1] * i10 : M[k][0] * i01 + M[k][1] * i11;
      R(2 * k, 2 * l) = u.real();
      R(2 * k + 1, 2 * l + 1) = u.real();
      R(2 * k, 2 * l + 1) = -u.imag();
      R(2 * k + 1, 2 * l) = u.imag();
    }
  return G * R;
}

// Sigmas closer than this (relative to ||W||_F) are treated as repeated.
inline constexpr double repeated_sigma_tol = 64.0 * machine_epsilon;

}  // namespace detail

enum class PaardekooperVariant { Implicit, Explicit };

// One row-cyclic sweep over all pairs of 2x2 slots. Works on skew(A) implicitly:
// only the local 4x4 skew part is formed, and the rotation is applied to A and Q.
// Subproblems whose coupling entries are all below `floor` are skipped.
inline void paardekooper_sweep(DenseMatrix& A, DenseMatrix& Q, double floor) {
  const std::size_t n = A.size();
  if (n % 2 != 0) throw std::invalid_argument("paardekooper_sweep: dimension must be even");
  const std::size_t m = n / 2;
  for (std::size_t a = 0; a + 1 < m; ++a)
    for (std::size_t b = a + 1; b < m; ++b) {
      const std::array<std::size_t, 4> idx{2 * a, 2 * a + 1, 2 * b, 2 * b + 1};
      Fixed<4> W;
      for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) W(i, j) = 0.5 * (A(idx[i], idx[j]) - A(idx[j], idx[i]));
      if (std::abs(W(2, 0)) < floor && std::abs(W(2, 1)) < floor && std::abs(W(3, 0)) < floor &&
          std::abs(W(3, 1)) < floor)
        continue;
      const SkewSchur4 r = schur_skew_4x4(W);
      if (std::abs(r.sigma1 - r.sigma2) <= detail::repeated_sigma_tol * W.frobenius())
        apply_similarity(A, Q, idx, detail::least_mixing(r.G));
      else
        apply_similarity(A, Q, idx, r.G);
    }
}

// Skipped entries total at most n * floor, so this floor never blocks convergence.
inline double skip_floor(double rho, double reference_norm, std::size_t n) {
  return 0.5 * rho * reference_norm / static_cast<double>(std::max<std::size_t>(n, 1));
}

// Repeats sweeps until offschur(skew(A)) <= rho * ||A||_F. The explicit variant
// forms Omega = skew(A), diagonalises it, and transforms A once at the end.
inline SweepStats paardekooper_until(DenseMatrix& A, DenseMatrix& Q, const SweepOptions& opts,
                                     PaardekooperVariant variant = PaardekooperVariant::Implicit) {
  if (A.size() != Q.size()) throw std::invalid_argument("paardekooper_until: A and Q differ in size");
  if (variant == PaardekooperVariant::Implicit) {
    const double ref = resolve_reference(opts, A);
    return run_sweeps(
        opts, opts.rho * ref, [&] { return offschur_skew(A); }, [&] { paardekooper_sweep(A, Q, skip_floor(opts.rho, ref, A.size())); });
  }
  DenseMatrix W = skew_part(A);
  const double ref = opts.reference_norm > 0.0 ? opts.reference_norm : frobenius_norm(W);
  DenseMatrix G = DenseMatrix::identity(A.size());
  const SweepStats st = run_sweeps(
      opts, opts.rho * ref, [&] { return offschur(W); }, [&] { paardekooper_sweep(W, G, skip_floor(opts.rho, ref, A.size())); });
  A = G.transposed() * A * G;
  Q = Q * G;
  return st;
}

}  // namespace normjac
