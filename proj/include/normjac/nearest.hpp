#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <vector>

#include "matrix.hpp"
#include "structured.hpp"

namespace normjac {

using cplx = std::complex<double>;

// Gaussian elimination with partial pivoting; empty when a pivot vanishes.
inline std::optional<ComplexMatrix> complex_inverse(const ComplexMatrix& B) {
  const std::size_t n = B.size();
  ComplexMatrix M = B;
  ComplexMatrix X = ComplexMatrix::identity(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(M(r, c)) > std::abs(M(piv, c))) piv = r;
    if (M(piv, c) == 0.0) return std::nullopt;
    if (piv != c)
      for (std::size_t t = 0; t < n; ++t) {
        std::swap(M(c, t), M(piv, t));
        std::swap(X(c, t), X(piv, t));
      }
    const cplx inv = 1.0 / M(c, c);
    for (std::size_t t = 0; t < n; ++t) {
      M(c, t) *= inv;
      X(c, t) *= inv;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || M(r, c) == 0.0) continue;
      const cplx f = M(r, c);
      for (std::size_t t = 0; t < n; ++t) {
        M(r, t) -= f * M(c, t);
        X(r, t) -= f * X(c, t);
      }
    }
  }
  return X;
}

struct ComplexSvd {
  ComplexMatrix U, V;
  std::vector<double> sigma;  // B = U diag(sigma) V^*
};

// One-sided (Hestenes) Jacobi SVD.
inline ComplexSvd complex_svd(const ComplexMatrix& B) {
  const std::size_t n = B.size();
  ComplexMatrix W = B;
  ComplexMatrix V = ComplexMatrix::identity(n);
  for (int sweep = 0; sweep < 80; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        double alpha = 0.0, beta = 0.0;
        cplx gamma = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
          alpha += std::norm(W(r, p));
          beta += std::norm(W(r, q));
          gamma += std::conj(W(r, p)) * W(r, q);
        }
        const double mag = std::abs(gamma);
        if (mag <= machine_epsilon * std::sqrt(alpha * beta) || mag == 0.0) continue;
        rotated = true;
        const GivensRotation g = jacobi_symmetric_rotation(alpha, mag, beta);
        const cplx phc = std::conj(gamma / mag);
        for (ComplexMatrix* M : {&W, &V})
          for (std::size_t r = 0; r < n; ++r) {
            const cplx x = (*M)(r, p), y = (*M)(r, q);
            (*M)(r, p) = g.c * x + g.s * phc * y;
            (*M)(r, q) = -g.s * x + g.c * phc * y;
          }
      }
    if (!rotated) break;
  }
  ComplexSvd out{ComplexMatrix(n), std::move(V), std::vector<double>(n)};
  double smax = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double s = 0.0;
    for (std::size_t r = 0; r < n; ++r) s += std::norm(W(r, k));
    out.sigma[k] = std::sqrt(s);
    smax = std::max(smax, out.sigma[k]);
  }
  // Columns with (numerically) zero singular value are completed to an orthonormal basis.
  std::vector<bool> filled(n, false);
  for (std::size_t k = 0; k < n; ++k)
    if (out.sigma[k] > n * machine_epsilon * smax && out.sigma[k] > 0.0) {
      for (std::size_t r = 0; r < n; ++r) out.U(r, k) = W(r, k) / out.sigma[k];
      filled[k] = true;
    }
  std::size_t next_basis = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (filled[k]) continue;
    while (next_basis < n) {
      std::vector<cplx> v(n, 0.0);
      v[next_basis++] = 1.0;
      for (int pass = 0; pass < 2; ++pass)
        for (std::size_t c = 0; c < n; ++c) {
          if (!filled[c]) continue;
          cplx d = 0.0;
          for (std::size_t r = 0; r < n; ++r) d += std::conj(out.U(r, c)) * v[r];
          for (std::size_t r = 0; r < n; ++r) v[r] -= d * out.U(r, c);
        }
      double nv = 0.0;
      for (const cplx& z : v) nv += std::norm(z);
      nv = std::sqrt(nv);
      if (nv < 1e-8) continue;
      for (std::size_t r = 0; r < n; ++r) out.U(r, k) = v[r] / nv;
      filled[k] = true;
      break;
    }
  }
  return out;
}

struct PolarResult {
  ComplexMatrix U;                // unitary factor of B = U H
  double hermitian_gap = 0.0;     // ||H - I||_F, equal to ||Sigma - I||_F
  bool non_unique = false;        // B is numerically rank deficient
  bool via_svd = false;
};

// Unitary polar factor by scaled Newton iteration; falls back to the SVD when B
// is ill-conditioned (Frobenius condition estimate above 1e8) or singular.
inline PolarResult complex_polar(const ComplexMatrix& B) {
  const std::size_t n = B.size();
  PolarResult out;
  const double nb = B.frobenius();
  std::optional<ComplexMatrix> inv = nb > 0.0 ? complex_inverse(B) : std::nullopt;
  if (inv && nb * inv->frobenius() <= 1e8) {
    ComplexMatrix X = B;
    for (int it = 0; it < 100; ++it) {
      const ComplexMatrix Xi = it == 0 ? *inv : *complex_inverse(X);
      const double zeta = std::sqrt(Xi.frobenius() / X.frobenius());
      ComplexMatrix Xn = (0.5 * zeta) * X + (0.5 / zeta) * Xi.adjoint();
      const double change = (Xn - X).frobenius();
      X = std::move(Xn);
      if (change <= 4.0 * n * machine_epsilon) break;
    }
    out.U = std::move(X);
    ComplexMatrix H = out.U.adjoint() * B;
    H = 0.5 * (H + H.adjoint());
    out.hermitian_gap = (H - ComplexMatrix::identity(n)).frobenius();
    return out;
  }
  ComplexSvd svd = complex_svd(B);
  out.via_svd = true;
  out.U = svd.U * svd.V.adjoint();
  double smax = 0.0, smin = std::numeric_limits<double>::infinity(), gap = 0.0;
  for (double s : svd.sigma) {
    smax = std::max(smax, s);
    smin = std::min(smin, s);
    gap += (s - 1.0) * (s - 1.0);
  }
  out.hermitian_gap = std::sqrt(gap);
  out.non_unique = smin <= n * machine_epsilon * smax;
  return out;
}

// J = J2 (x) I_m = [[0, -I], [I, 0]] for 2m x 2m matrices.
inline DenseMatrix symplectic_unit(std::size_t n) {
  if (n % 2 != 0) throw std::invalid_argument("symplectic_unit: dimension must be even");
  const std::size_t m = n / 2;
  DenseMatrix J(n);
  for (std::size_t i = 0; i < m; ++i) {
    J(i, m + i) = -1.0;
    J(m + i, i) = 1.0;
  }
  return J;
}

struct NearestOsp {
  DenseMatrix R;          // nearest orthogonal matrix commuting with J
  double distance = 0.0;  // ||A - R||_F
  bool non_unique = false;
};

// Nearest ortho-symplectic matrix in Frobenius norm: realification of the unitary
// polar factor of B = (A11 + A22)/2 + i (A21 - A12)/2.
inline NearestOsp nearest_ortho_symplectic(const DenseMatrix& A) {
  const std::size_t n = A.size();
  if (n % 2 != 0 || n == 0) throw std::invalid_argument("nearest_ortho_symplectic: dimension must be even");
  const std::size_t m = n / 2;
  ComplexMatrix B(m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      B(i, j) = cplx(0.5 * (A(i, j) + A(m + i, m + j)), 0.5 * (A(m + i, j) - A(i, m + j)));
  const PolarResult pol = complex_polar(B);
  NearestOsp out{DenseMatrix(n), 0.0, pol.non_unique};
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      const cplx u = pol.U(i, j);
      out.R(i, j) = u.real();
      out.R(m + i, m + j) = u.real();
      out.R(i, m + j) = -u.imag();
      out.R(m + i, j) = u.imag();
    }
  const DenseMatrix J = symplectic_unit(n);
  const double comm = frobenius_norm(A * J - J * A);
  out.distance = std::sqrt(2.0 * pol.hermitian_gap * pol.hermitian_gap + 0.25 * comm * comm);
  return out;
}

struct OspBounds {
  double squared = 0.0;  // bound on the squared distance from the orthogonality and symplecticity defects
  double linear = 0.0;   // weaker bound on the distance itself
};

inline OspBounds osp_distance_bound(const DenseMatrix& A) {
  const std::size_t n = A.size();
  const DenseMatrix J = symplectic_unit(n);
  const DenseMatrix At = A.transposed();
  const double orth = frobenius_norm(At * A - DenseMatrix::identity(n));
  const double symp = frobenius_norm(At * J * A - J);
  const double comm = frobenius_norm(A * J - J * A);
  return {0.25 * (orth + symp) * (orth + symp) + 0.25 * comm * comm, 0.5 * (orth + symp + comm)};
}

}  // namespace normjac
