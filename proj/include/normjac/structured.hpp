#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "matrix.hpp"
#include "sweep.hpp"

namespace normjac {

// Orthogonal projection onto symmetric skew-Hamiltonian matrices [[H, W], [-W, H]]
// (H symmetric, W skew), i.e. the symmetric matrices commuting with J2 (x) I_m.
inline DenseMatrix sskh(const DenseMatrix& A) {
  const std::size_t n = A.size();
  if (n % 2 != 0) throw std::invalid_argument("sskh: dimension must be even");
  const std::size_t m = n / 2;
  DenseMatrix out(n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      const double h = 0.25 * (A(i, j) + A(j, i) + A(m + i, m + j) + A(m + j, m + i));
      const double w = 0.25 * (A(i, m + j) - A(m + i, j) - A(j, m + i) + A(m + j, i));
      out(i, j) = h;
      out(m + i, m + j) = h;
      out(i, m + j) = w;
      out(m + i, j) = -w;
    }
  return out;
}

// Same projection in the slot-interleaved basis: P_eo sskh(P_eo^T M P_eo) P_eo^T.
inline DenseMatrix sskh2(const DenseMatrix& M) {
  const Permutation p = even_odd_permutation(M.size());
  return p.inverse().conjugate(sskh(p.conjugate(M)));
}

// The four numbers defining the projection onto the 4x4 block of slots (i, i+1), (j, j+1).
struct SskhBlockParams {
  double h1 = 0.0, h2 = 0.0, h3 = 0.0, omega = 0.0;
};

inline SskhBlockParams sskh_params(const DenseMatrix& A, std::size_t i, std::size_t j) {
  return {0.5 * (A(i, i) + A(i + 1, i + 1)), 0.25 * (A(i, j) + A(i + 1, j + 1) + A(j, i) + A(j + 1, i + 1)),
          0.5 * (A(j, j) + A(j + 1, j + 1)), 0.25 * (A(i, j + 1) - A(i + 1, j) + A(j + 1, i) - A(j, i + 1))};
}

inline Fixed<4> sskh_block(const SskhBlockParams& p) {
  Fixed<4> B;
  B.a = {p.h1, 0.0, p.h2, p.omega, 0.0, p.h1, -p.omega, p.h2, p.h2, -p.omega, p.h3, 0.0, p.omega, p.h2, 0.0, p.h3};
  return B;
}

// Orthogonal R with R^T B R = diag(l1, l1, l2, l2) for B = sskh_block(p). R commutes
// with I2 (x) J2, so a sigma * (I (x) J2) shift is left untouched, and R is the
// identity when the coupling (h2, omega) vanishes.
inline Fixed<4> sskh_rotation(const SskhBlockParams& p) {
  double p1 = -p.omega, p2 = 0.5 * (p.h1 - p.h3), p3 = p.h2;
  const bool swap = p2 < 0.0;
  if (swap) {
    p1 = -p1;
    p2 = -p2;
  }
  const double alpha = std::sqrt(p1 * p1 + p2 * p2 + p3 * p3);
  if (alpha == 0.0) return Fixed<4>::identity();
  const double beta = alpha + p2;
  const double k = 1.0 / std::sqrt(2.0 * alpha * beta);
  // Rows 2 and 3 of the even-odd form are interchanged to act in the slot basis.
  Fixed<4> R;
  R.a = {k * beta, 0.0,      -k * p3,  k * p1,  0.0,     k * beta, -k * p1, -k * p3,
         k * p3,   k * p1,   k * beta, 0.0,     -k * p1, k * p3,   0.0,     k * beta};
  if (!swap) return R;
  // Conjugate by the slot interchange.
  Fixed<4> S;
  S.a = {0, 0, 1, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0, 1, 0, 0};
  return S * R * S;
}

// offdiag(sskh2(A_ll)) for a cluster made of whole slots.
inline double sskh_offdiag(const DenseMatrix& A, const std::vector<std::size_t>& l) {
  double s = 0.0;
  for (std::size_t a = 0; a < l.size(); a += 2)
    for (std::size_t b = a + 2; b < l.size(); b += 2) {
      const SskhBlockParams p = sskh_params(A, l[a], l[b]);
      s += 4.0 * (p.h2 * p.h2 + p.omega * p.omega);
    }
  return std::sqrt(s);
}

// offschur(A_ll - sskh2(A_ll)).
inline double sskh_offschur_residual(const DenseMatrix& A, const std::vector<std::size_t>& l) {
  double s = 0.0;
  for (std::size_t a = 0; a < l.size(); a += 2)
    for (std::size_t b = a + 2; b < l.size(); b += 2) {
      const std::size_t i = l[a], j = l[b];
      const SskhBlockParams p = sskh_params(A, i, j);
      const double up[4] = {A(i, j) - p.h2, A(i, j + 1) - p.omega, A(i + 1, j) + p.omega, A(i + 1, j + 1) - p.h2};
      const double lo[4] = {A(j, i) - p.h2, A(j, i + 1) + p.omega, A(j + 1, i) - p.omega, A(j + 1, i + 1) - p.h2};
      for (int k = 0; k < 4; ++k) s += up[k] * up[k] + lo[k] * lo[k];
    }
  return std::sqrt(s);
}

// ||(A_ll - sigma I (x) J2) - sskh2(A_ll)||_F, the distance of the shifted cluster
// block from the SSkH set.
inline double sskh_gap(const DenseMatrix& A, const std::vector<std::size_t>& l, double sigma) {
  double s = 0.0;
  for (std::size_t a = 0; a < l.size(); a += 2) {
    const std::size_t i = l[a];
    const double h1 = 0.5 * (A(i, i) + A(i + 1, i + 1));
    const double d[4] = {A(i, i) - h1, A(i + 1, i + 1) - h1, A(i, i + 1) + sigma, A(i + 1, i) - sigma};
    for (double x : d) s += x * x;
  }
  const double r = sskh_offschur_residual(A, l);
  return std::sqrt(s + r * r);
}

// ||skew(A_ll)||_F
inline double skew_norm(const DenseMatrix& A, const std::vector<std::size_t>& l) {
  double s = 0.0;
  for (std::size_t a = 0; a < l.size(); ++a)
    for (std::size_t b = a + 1; b < l.size(); ++b) {
      const double w = 0.5 * (A(l[a], l[b]) - A(l[b], l[a]));
      s += 2.0 * w * w;
    }
  return std::sqrt(s);
}

// offdiag(sym(A_ll))
inline double sym_offdiag(const DenseMatrix& A, const std::vector<std::size_t>& l) {
  double s = 0.0;
  for (std::size_t a = 0; a < l.size(); ++a)
    for (std::size_t b = a + 1; b < l.size(); ++b) {
      const double h = 0.5 * (A(l[a], l[b]) + A(l[b], l[a]));
      s += 2.0 * h * h;
    }
  return std::sqrt(s);
}

inline void require_slots(const std::vector<std::size_t>& l, std::size_t n, const char* who) {
  if (l.size() % 2 != 0) throw std::invalid_argument(std::string(who) + ": cluster must consist of whole slots");
  for (std::size_t a = 0; a < l.size(); a += 2)
    if (l[a] % 2 != 0 || l[a + 1] != l[a] + 1 || l[a + 1] >= n)
      throw std::invalid_argument(std::string(who) + ": cluster must consist of whole slots");
}

// Jacobi method for the SSkH part of a cluster: sweeps over slot pairs until
// offdiag(sskh2(A_ll)) <= rho * reference.
inline SweepStats sskh_jacobi(DenseMatrix& A, DenseMatrix& Q, const std::vector<std::size_t>& l,
                              const SweepOptions& opts) {
  require_slots(l, A.size(), "sskh_jacobi");
  const double ref = resolve_reference(opts, A);
  return run_sweeps(
      opts, opts.rho * ref, [&] { return sskh_offdiag(A, l); },
      [&] {
        for (std::size_t a = 0; a < l.size(); a += 2)
          for (std::size_t b = a + 2; b < l.size(); b += 2) {
            const SskhBlockParams p = sskh_params(A, l[a], l[b]);
            if (p.h2 == 0.0 && p.omega == 0.0) continue;
            apply_similarity(A, Q, std::array<std::size_t, 4>{l[a], l[a] + 1, l[b], l[b] + 1}, sskh_rotation(p));
          }
      });
}

// Rotation [[c, -s], [s, c]] in plane (i, j) diagonalising [[h11, h12], [h12, h22]],
// with the smaller of the two possible angles.
inline GivensRotation jacobi_symmetric_rotation(double h11, double h12, double h22, std::size_t i = 0,
                                                std::size_t j = 1) {
  if (h12 == 0.0) return {i, j, 1.0, 0.0};
  const double kappa = (h11 - h22) / (2.0 * h12);
  const double t = (kappa < 0.0 ? -1.0 : 1.0) / (std::abs(kappa) + std::hypot(1.0, kappa));
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  return {i, j, c, c * t};
}

// Cyclic Jacobi on the symmetric part of A_ll, for clusters whose skew part is negligible.
inline SweepStats symmetric_jacobi(DenseMatrix& A, DenseMatrix& Q, const std::vector<std::size_t>& l,
                                   const SweepOptions& opts) {
  for (std::size_t k : l)
    if (k >= A.size()) throw std::out_of_range("symmetric_jacobi: index out of range");
  const double ref = resolve_reference(opts, A);
  return run_sweeps(
      opts, opts.rho * ref, [&] { return sym_offdiag(A, l); },
      [&] {
        for (std::size_t a = 0; a < l.size(); ++a)
          for (std::size_t b = a + 1; b < l.size(); ++b) {
            const std::size_t i = l[a], j = l[b];
            const double h12 = 0.5 * (A(i, j) + A(j, i));
            if (h12 == 0.0) continue;
            apply_givens_similarity(A, Q, jacobi_symmetric_rotation(A(i, i), h12, A(j, j), i, j));
          }
      });
}

}  // namespace normjac
