#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <complex>
#include <limits>
#include <vector>

#include "normjac/matrix.hpp"
#include "normjac/rng.hpp"

namespace normjac::testing {

using cplx = std::complex<double>;

inline Eigen::MatrixXd to_eigen(const DenseMatrix& A) {
  Eigen::MatrixXd M(A.size(), A.size());
  for (std::size_t i = 0; i < A.size(); ++i)
    for (std::size_t j = 0; j < A.size(); ++j) M(i, j) = A(i, j);
  return M;
}

template <std::size_t K>
Eigen::MatrixXd to_eigen(const Fixed<K>& A) {
  Eigen::MatrixXd M(K, K);
  for (std::size_t i = 0; i < K; ++i)
    for (std::size_t j = 0; j < K; ++j) M(i, j) = A(i, j);
  return M;
}

inline DenseMatrix from_eigen(const Eigen::MatrixXd& M) {
  DenseMatrix A(static_cast<std::size_t>(M.rows()));
  for (std::size_t i = 0; i < A.size(); ++i)
    for (std::size_t j = 0; j < A.size(); ++j) A(i, j) = M(i, j);
  return A;
}

inline DenseMatrix random_matrix(std::size_t n, CounterRng& rng) {
  DenseMatrix A(n);
  for (double& x : A.entries()) x = rng.normal();
  return A;
}

inline DenseMatrix random_skew(std::size_t n, CounterRng& rng) { return skew_part(random_matrix(n, rng)); }

inline DenseMatrix random_symmetric(std::size_t n, CounterRng& rng) { return sym_part(random_matrix(n, rng)); }

template <std::size_t K>
Fixed<K> random_fixed(CounterRng& rng) {
  Fixed<K> F;
  for (double& x : F.a) x = rng.normal();
  return F;
}

template <std::size_t K>
Fixed<K> random_skew_fixed(CounterRng& rng) {
  Fixed<K> F;
  for (std::size_t i = 0; i < K; ++i)
    for (std::size_t j = i + 1; j < K; ++j) {
      F(i, j) = rng.normal();
      F(j, i) = -F(i, j);
    }
  return F;
}

// Orthogonal factor of an Eigen QR, independent of the library's own generator.
inline DenseMatrix oracle_orthogonal(std::size_t n, CounterRng& rng) {
  Eigen::MatrixXd G(n, n);
  for (Eigen::Index i = 0; i < G.rows(); ++i)
    for (Eigen::Index j = 0; j < G.cols(); ++j) G(i, j) = rng.normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
  return from_eigen(qr.householderQ() * Eigen::MatrixXd::Identity(n, n));
}

inline std::vector<cplx> eigenvalues(const DenseMatrix& A) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(to_eigen(A), false);
  std::vector<cplx> out;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) out.push_back(es.eigenvalues()[k]);
  return out;
}

template <std::size_t K>
std::vector<cplx> eigenvalues(const Fixed<K>& A) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(to_eigen(A), false);
  std::vector<cplx> out;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) out.push_back(es.eigenvalues()[k]);
  return out;
}

inline std::vector<double> symmetric_eigenvalues(const DenseMatrix& A) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(A), Eigen::EigenvaluesOnly);
  std::vector<double> out(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  return out;
}

// Hungarian algorithm (min total cost); returns the largest distance in the optimal matching.
inline double matching_distance(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  const std::size_t n = a.size();
  if (b.size() != n) return std::numeric_limits<double>::infinity();
  if (n == 0) return 0.0;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), way_cost(n + 1);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = std::abs(a[i0 - 1] - b[j - 1]) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  double worst = 0.0;
  for (std::size_t j = 1; j <= n; ++j) worst = std::max(worst, std::abs(a[p[j] - 1] - b[j - 1]));
  return worst;
}

inline double max_abs_diff(const DenseMatrix& A, const DenseMatrix& B) {
  double m = 0.0;
  for (std::size_t k = 0; k < A.entries().size(); ++k) m = std::max(m, std::abs(A.entries()[k] - B.entries()[k]));
  return m;
}

// 4x4 matrix from section 4 of the reference example and its pieces.
inline DenseMatrix golden_matrix() {
  return {{1, 1, 1, -1}, {1, 1, -1, 1}, {1, -1, -1, -1}, {1, -1, 1, 1}};
}

// sigma pair of a 4x4 skew matrix from the Pfaffian and the Frobenius norm alone.
inline std::pair<double, double> pfaffian_oracle(const Fixed<4>& W) {
  const double pf = std::abs(W(1, 0) * W(3, 2) - W(2, 0) * W(3, 1) + W(3, 0) * W(2, 1));
  const double sum = 0.5 * W.frobenius() * W.frobenius();
  const double a = std::sqrt(std::max(0.0, sum + 2.0 * pf)), b = std::sqrt(std::max(0.0, sum - 2.0 * pf));
  return {0.5 * (a + b), 0.5 * (a - b)};
}

// [[H, W], [-W, H]] with H symmetric and W skew: the SSkH set in grouped (non-slot) order.
inline DenseMatrix random_sskh(std::size_t m, CounterRng& rng) {
  const DenseMatrix H = random_symmetric(m, rng), W = random_skew(m, rng);
  DenseMatrix S(2 * m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      S(i, j) = S(m + i, m + j) = H(i, j);
      S(i, m + j) = W(i, j);
      S(m + i, j) = -W(i, j);
    }
  return S;
}

// Eigenvalues read off the diagonal blocks of a quasi triangular T.
inline std::vector<cplx> block_eigenvalues(const Fixed<4>& T) {
  std::vector<cplx> ev;
  for (std::size_t k = 0; k < 4;) {
    if (k + 1 < 4 && T(k + 1, k) != 0.0) {
      const double a = T(k, k), b = T(k, k + 1), c = T(k + 1, k), d = T(k + 1, k + 1);
      const cplx disc = std::sqrt(cplx(0.25 * (a - d) * (a - d) + b * c, 0.0));
      ev.push_back(0.5 * (a + d) + disc);
      ev.push_back(0.5 * (a + d) - disc);
      k += 2;
    } else {
      ev.emplace_back(T(k, k), 0.0);
      ++k;
    }
  }
  return ev;
}

// Characteristic polynomial by Faddeev-LeVerrier, roots by Durand-Kerner.
inline std::vector<cplx> quartic_roots(const Fixed<4>& M) {
  using ld = long double;
  ld A[4][4], Mk[4][4], c[5];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      A[i][j] = M(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      Mk[i][j] = 0;
    }
  c[4] = 1;
  for (int k = 1; k <= 4; ++k) {
    ld AM[4][4];
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        AM[i][j] = 0;
        for (int t = 0; t < 4; ++t) AM[i][j] += A[i][t] * Mk[t][j];
      }
    for (int i = 0; i < 4; ++i) Mk[i][i] = 0;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) Mk[i][j] = AM[i][j] + (i == j ? c[4 - k + 1] : 0);
    ld tr = 0;
    for (int i = 0; i < 4; ++i)
      for (int t = 0; t < 4; ++t) tr += A[i][t] * Mk[t][i];
    c[4 - k] = -tr / k;
  }
  using lc = std::complex<ld>;
  auto p = [&](lc z) { return (((z + c[3]) * z + c[2]) * z + c[1]) * z + c[0]; };
  ld r = 1;
  for (int i = 0; i < 4; ++i) r = std::max(r, 1 + std::abs(c[i]));
  std::array<lc, 4> z;
  for (int i = 0; i < 4; ++i) z[i] = std::polar(r, 0.4L + 1.5707963267948966L * i);
  for (int it = 0; it < 2000; ++it) {
    ld move = 0;
    for (int i = 0; i < 4; ++i) {
      lc den = 1;
      for (int j = 0; j < 4; ++j)
        if (j != i) den *= z[i] - z[j];
      const lc step = p(z[i]) / den;
      z[i] -= step;
      move = std::max(move, std::abs(step));
    }
    if (move < 1e-19L * r) break;
  }
  std::vector<cplx> out;
  for (auto w : z) out.emplace_back(static_cast<double>(w.real()), static_cast<double>(w.imag()));
  return out;
}

}  // namespace normjac::testing
