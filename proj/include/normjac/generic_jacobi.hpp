#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "clustering.hpp"
#include "matrix.hpp"
#include "rng.hpp"
#include "structured.hpp"
#include "sweep.hpp"

namespace normjac {

// Order of the diagonal blocks in real_schur_4x4. Both keep T(2,1) == 0 so the
// result splits into two 2x2 slots.
enum class SchurOrdering {
  AscendingReal,  // blocks sorted by ascending real part
  Natural,        // order produced by the QR iteration, changed only to split the slots
  Nearest,        // order whose R keeps the most weight inside the two 2x2 slots
};

struct Schur4 {
  Fixed<4> R;  // orthogonal, R^T M R = T
  Fixed<4> T;  // quasi upper triangular, complex pairs as [[a, b], [c, a]] with c > 0
};

namespace detail {

struct SmallSchur {
  Fixed<4> T, Z;

  void rotate(std::size_t k, double c, double s) {
    for (std::size_t j = 0; j < 4; ++j) {
      const double x = T(k, j), y = T(k + 1, j);
      T(k, j) = c * x + s * y;
      T(k + 1, j) = -s * x + c * y;
    }
    for (std::size_t i = 0; i < 4; ++i) {
      double x = T(i, k), y = T(i, k + 1);
      T(i, k) = c * x + s * y;
      T(i, k + 1) = -s * x + c * y;
      x = Z(i, k);
      y = Z(i, k + 1);
      Z(i, k) = c * x + s * y;
      Z(i, k + 1) = -s * x + c * y;
    }
  }

  // Householder reflector I - 2 v v^T / (v^T v) acting on indices k..k+len-1.
  void reflect(std::size_t k, const double* v, std::size_t len, std::size_t col_lo, std::size_t row_hi) {
    double vv = 0.0;
    for (std::size_t t = 0; t < len; ++t) vv += v[t] * v[t];
    if (vv == 0.0) return;
    const double f = 2.0 / vv;
    for (std::size_t j = col_lo; j < 4; ++j) {
      double d = 0.0;
      for (std::size_t t = 0; t < len; ++t) d += v[t] * T(k + t, j);
      d *= f;
      for (std::size_t t = 0; t < len; ++t) T(k + t, j) -= d * v[t];
    }
    for (std::size_t i = 0; i <= row_hi; ++i) {
      double d = 0.0;
      for (std::size_t t = 0; t < len; ++t) d += T(i, k + t) * v[t];
      d *= f;
      for (std::size_t t = 0; t < len; ++t) T(i, k + t) -= d * v[t];
    }
    for (std::size_t i = 0; i < 4; ++i) {
      double d = 0.0;
      for (std::size_t t = 0; t < len; ++t) d += Z(i, k + t) * v[t];
      d *= f;
      for (std::size_t t = 0; t < len; ++t) Z(i, k + t) -= d * v[t];
    }
  }

  static void householder_vector(const double* x, std::size_t len, double* v) {
    double norm = 0.0;
    for (std::size_t t = 0; t < len; ++t) norm += x[t] * x[t];
    norm = std::sqrt(norm);
    for (std::size_t t = 0; t < len; ++t) v[t] = x[t];
    if (norm == 0.0) {
      for (std::size_t t = 0; t < len; ++t) v[t] = 0.0;
      return;
    }
    v[0] += x[0] >= 0.0 ? norm : -norm;
  }

  void hessenberg() {
    for (std::size_t k = 0; k + 2 < 4; ++k) {
      double x[3], v[3];
      const std::size_t len = 3 - k;
      for (std::size_t t = 0; t < len; ++t) x[t] = T(k + 1 + t, k);
      householder_vector(x, len, v);
      reflect(k + 1, v, len, 0, 3);
      for (std::size_t t = 1; t < len; ++t) T(k + 1 + t, k) = 0.0;
    }
  }

  // Brings the 2x2 block at (k, k) to standard form: upper triangular for real
  // eigenvalues, equal diagonal with opposite-signed off-diagonal otherwise.
  void standardize(std::size_t k) {
    const double eps = machine_epsilon;
    double a = T(k, k), b = T(k, k + 1), c = T(k + 1, k), d = T(k + 1, k + 1);
    if (c == 0.0) return;
    if (b == 0.0) {
      rotate(k, 0.0, 1.0);
      T(k + 1, k) = 0.0;
      return;
    }
    if (a - d == 0.0 && (b < 0.0) != (c < 0.0)) return;
    const double temp = a - d;
    const double p = 0.5 * temp;
    const double bcmax = std::max(std::abs(b), std::abs(c));
    const double bcmis = std::min(std::abs(b), std::abs(c)) * (b < 0.0 ? -1.0 : 1.0) * (c < 0.0 ? -1.0 : 1.0);
    const double scale = std::max(std::abs(p), bcmax);
    double z = (p / scale) * p + (bcmax / scale) * bcmis;
    if (z >= 4.0 * eps) {
      z = p + std::copysign(std::sqrt(scale) * std::sqrt(z), p);
      const double tau = std::hypot(c, z);
      rotate(k, z / tau, c / tau);
      T(k + 1, k) = 0.0;
      return;
    }
    const double sigma = b + c;
    const double tau = std::hypot(sigma, temp);
    const double cs = std::sqrt(0.5 * (1.0 + std::abs(sigma) / tau));
    const double sn = -(p / (tau * cs)) * (sigma >= 0.0 ? 1.0 : -1.0);
    rotate(k, cs, sn);
    const double mid = 0.5 * (T(k, k) + T(k + 1, k + 1));
    T(k, k) = mid;
    T(k + 1, k + 1) = mid;
    b = T(k, k + 1);
    c = T(k + 1, k);
    if (c == 0.0) return;
    if (b == 0.0) {
      rotate(k, 0.0, 1.0);
      T(k + 1, k) = 0.0;
      return;
    }
    if ((b < 0.0) == (c < 0.0)) {
      const double sab = std::sqrt(std::abs(b)), sac = std::sqrt(std::abs(c));
      const double t = 1.0 / std::sqrt(std::abs(b + c));
      rotate(k, sab * t, sac * t);
      T(k + 1, k) = 0.0;
    }
  }

  void francis_step(std::size_t lo, std::size_t hi, int iter) {
    double tr, det;
    if (iter % 10 == 0) {
      // Exceptional shift anchored at alternating ends of the window; breaks the
      // cycles seen when eigenvalues are symmetric about the standard shifts.
      const int round = iter / 10;
      const double s = std::abs(T(hi, hi - 1)) + std::abs(T(hi - 1, hi - 2));
      const double h11 = 0.75 * s * (1.0 + 0.1 * round) + (round % 2 ? T(hi, hi) : T(lo, lo));
      tr = 2.0 * h11;
      det = h11 * h11 + 0.4375 * s * s;
    } else {
      tr = T(hi - 1, hi - 1) + T(hi, hi);
      det = T(hi - 1, hi - 1) * T(hi, hi) - T(hi - 1, hi) * T(hi, hi - 1);
    }
    double x = T(lo, lo) * T(lo, lo) + T(lo, lo + 1) * T(lo + 1, lo) - tr * T(lo, lo) + det;
    double y = T(lo + 1, lo) * (T(lo, lo) + T(lo + 1, lo + 1) - tr);
    double z = T(lo + 1, lo) * T(lo + 2, lo + 1);
    for (std::size_t k = lo; k + 2 <= hi; ++k) {
      const double xs[3] = {x, y, z};
      double v[3];
      householder_vector(xs, 3, v);
      reflect(k, v, 3, k > lo ? k - 1 : lo, std::min(k + 3, hi));
      if (k > lo) {
        T(k + 1, k - 1) = 0.0;
        T(k + 2, k - 1) = 0.0;
      }
      x = T(k + 1, k);
      y = T(k + 2, k);
      if (k + 3 <= hi) z = T(k + 3, k);
    }
    const double xs[2] = {x, y};
    double v[2];
    householder_vector(xs, 2, v);
    reflect(hi - 1, v, 2, hi - 2, hi);
    T(hi, hi - 2) = 0.0;
  }

  void iterate() {
    const double eps = machine_epsilon;
    std::size_t hi = 3;
    int iter = 0, total = 0;
    while (hi > 0) {
      std::size_t l = hi;
      for (; l > 0; --l) {
        double s = std::abs(T(l - 1, l - 1)) + std::abs(T(l, l));
        if (s == 0.0) s = T.frobenius();
        if (std::abs(T(l, l - 1)) <= eps * s) {
          T(l, l - 1) = 0.0;
          break;
        }
      }
      if (l == hi) {
        --hi;
        iter = 0;
        continue;
      }
      if (l + 1 == hi) {
        standardize(l);
        if (hi < 2) break;
        hi -= 2;
        iter = 0;
        continue;
      }
      if (++total > 120) throw ConvergenceError("real_schur_4x4: QR iteration did not converge");
      francis_step(l, hi, ++iter);
    }
  }

  struct Block {
    std::size_t start, size;
    double re;
  };

  std::vector<Block> blocks() const {
    std::vector<Block> out;
    for (std::size_t i = 0; i < 4;) {
      if (i + 1 < 4 && T(i + 1, i) != 0.0) {
        out.push_back({i, 2, 0.5 * (T(i, i) + T(i + 1, i + 1))});
        i += 2;
      } else {
        out.push_back({i, 1, T(i, i)});
        i += 1;
      }
    }
    return out;
  }

  // Swaps adjacent diagonal blocks of sizes p and q starting at k, through the
  // Sylvester equation T11 X - X T22 = T12. Leaves T unchanged if that is ill-posed.
  bool swap_blocks(std::size_t k, std::size_t p, std::size_t q) {
    const std::size_t nn = p * q;
    double M[4][5] = {};
    for (std::size_t r = 0; r < p; ++r)
      for (std::size_t s = 0; s < q; ++s) {
        const std::size_t row = r * q + s;
        for (std::size_t t = 0; t < p; ++t) M[row][t * q + s] += T(k + r, k + t);
        for (std::size_t t = 0; t < q; ++t) M[row][r * q + t] -= T(k + p + t, k + p + s);
        M[row][nn] = T(k + r, k + p + s);
      }
    const double scale = std::max(T.frobenius(), 1e-300);
    for (std::size_t c = 0; c < nn; ++c) {
      std::size_t piv = c;
      for (std::size_t r = c + 1; r < nn; ++r)
        if (std::abs(M[r][c]) > std::abs(M[piv][c])) piv = r;
      if (std::abs(M[piv][c]) <= 1e-14 * scale) return false;
      for (std::size_t t = 0; t <= nn; ++t) std::swap(M[c][t], M[piv][t]);
      for (std::size_t r = c + 1; r < nn; ++r) {
        const double f = M[r][c] / M[c][c];
        for (std::size_t t = c; t <= nn; ++t) M[r][t] -= f * M[c][t];
      }
    }
    double X[4];
    for (std::size_t c = nn; c-- > 0;) {
      double s = M[c][nn];
      for (std::size_t t = c + 1; t < nn; ++t) s -= M[c][t] * X[t];
      X[c] = s / M[c][c];
    }
    // Columns of [-X; I_q] span the invariant subspace of T22; orthonormalise them
    // with Householder reflectors and rotate that subspace to the front.
    const std::size_t w = p + q;
    double B[4][2] = {};
    for (std::size_t r = 0; r < p; ++r)
      for (std::size_t s = 0; s < q; ++s) B[r][s] = -X[r * q + s];
    for (std::size_t s = 0; s < q; ++s) B[p + s][s] = 1.0;

    const SmallSchur saved = *this;
    for (std::size_t c = 0; c < q; ++c) {
      double x[4], v[4];
      const std::size_t len = w - c;
      for (std::size_t t = 0; t < len; ++t) x[t] = B[c + t][c];
      householder_vector(x, len, v);
      double vv = 0.0;
      for (std::size_t t = 0; t < len; ++t) vv += v[t] * v[t];
      if (vv > 0.0)
        for (std::size_t s = c; s < q; ++s) {
          double d = 0.0;
          for (std::size_t t = 0; t < len; ++t) d += v[t] * B[c + t][s];
          d *= 2.0 / vv;
          for (std::size_t t = 0; t < len; ++t) B[c + t][s] -= d * v[t];
        }
      reflect(k + c, v, len, 0, 3);
    }
    double lower = 0.0;
    for (std::size_t r = k + q; r < k + w; ++r)
      for (std::size_t c = k; c < k + q; ++c) lower += T(r, c) * T(r, c);
    if (std::sqrt(lower) > 1e-10 * scale) {
      *this = saved;
      return false;
    }
    for (std::size_t r = k + q; r < k + w; ++r)
      for (std::size_t c = k; c < k + q; ++c) T(r, c) = 0.0;
    if (q == 2) standardize(k);
    if (p == 2) standardize(k + q);
    return true;
  }

  double slot_weight() const {
    double w = 0.0;
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j)
        if (i / 2 == j / 2) w += Z(i, j) * Z(i, j);
    return w;
  }

  // Explores every block order reachable through adjacent swaps and keeps the
  // admissible one (T(2,1) == 0) with the largest slot weight.
  void order_nearest() {
    std::vector<SmallSchur> seen{*this};
    auto signature = [](const SmallSchur& s) {
      std::array<double, 4> d{};
      for (std::size_t i = 0; i < 4; ++i) d[i] = s.T(i, i);
      return d;
    };
    auto known = [&](const SmallSchur& s) {
      const auto d = signature(s);
      for (const auto& t : seen) {
        const auto e = signature(t);
        bool same = true;
        for (std::size_t i = 0; i < 4; ++i) same = same && std::abs(d[i] - e[i]) <= 1e-12 * (1.0 + std::abs(d[i]));
        if (same && (s.T(1, 0) != 0.0) == (t.T(1, 0) != 0.0) && (s.T(3, 2) != 0.0) == (t.T(3, 2) != 0.0)) return true;
      }
      return false;
    };
    for (std::size_t k = 0; k < seen.size() && seen.size() < 24; ++k) {
      const auto bl = seen[k].blocks();
      for (std::size_t b = 0; b + 1 < bl.size(); ++b) {
        SmallSchur next = seen[k];
        if (next.swap_blocks(bl[b].start, bl[b].size, bl[b + 1].size) && !known(next)) seen.push_back(next);
      }
    }
    const SmallSchur* best = nullptr;
    for (const auto& s : seen)
      if (s.T(2, 1) == 0.0 && (!best || s.slot_weight() > best->slot_weight())) best = &s;
    if (best) *this = *best;
  }

  void order(SchurOrdering ordering) {
    if (ordering == SchurOrdering::Nearest) {
      order_nearest();
      if (T(2, 1) == 0.0) return;
    }
    if (ordering == SchurOrdering::AscendingReal) {
      for (int pass = 0; pass < 8; ++pass) {
        bool changed = false;
        auto bl = blocks();
        for (std::size_t b = 0; b + 1 < bl.size(); ++b)
          if (bl[b].re > bl[b + 1].re && swap_blocks(bl[b].start, bl[b].size, bl[b + 1].size)) {
            changed = true;
            break;
          }
        if (!changed) break;
      }
    }
    if (T(2, 1) != 0.0) {
      const auto bl = blocks();
      swap_blocks(bl[0].start, bl[0].size, bl[1].size);
    }
  }

  void finish() {
    for (std::size_t k = 0; k < 3; ++k)
      if (T(k + 1, k) < 0.0) {
        for (std::size_t j = 0; j < 4; ++j) T(k + 1, j) = -T(k + 1, j);
        for (std::size_t i = 0; i < 4; ++i) {
          T(i, k + 1) = -T(i, k + 1);
          Z(i, k + 1) = -Z(i, k + 1);
        }
      }
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j + 1 < i; ++j) T(i, j) = 0.0;
  }
};

}  // namespace detail

// R^T M R = T in real Schur form with T(2, 1) == 0 (0-based).
inline Schur4 real_schur_4x4(const Fixed<4>& M, SchurOrdering ordering = SchurOrdering::AscendingReal) {
  for (double x : M.a)
    if (!std::isfinite(x)) throw std::invalid_argument("real_schur_4x4: non-finite input");
  detail::SmallSchur w{M, Fixed<4>::identity()};
  w.hessenberg();
  w.iterate();
  w.order(ordering);
  w.finish();
  return {w.Z, w.T};
}

// offschur restricted to the slots of a cluster.
inline double cluster_offschur(const DenseMatrix& A, const std::vector<std::size_t>& l) {
  double s = 0.0;
  for (std::size_t a = 0; a < l.size(); ++a)
    for (std::size_t b = 0; b < l.size(); ++b)
      if (!same_slot(l[a], l[b])) s += A(l[a], l[b]) * A(l[a], l[b]);
  return std::sqrt(s);
}

struct ZhouBrentOptions : SweepOptions {
  // Abandon the iteration as soon as a sweep increases offschur of the whole matrix.
  bool break_on_increase = false;
  SchurOrdering ordering = SchurOrdering::AscendingReal;
};

// Jacobi-like method on pairs of 2x2 slots of a cluster; each step brings the
// 4x4 principal submatrix to real Schur form. Stops once offschur(A_ll) <= rho * reference.
inline SweepStats zhou_brent(DenseMatrix& A, DenseMatrix& Q, const std::vector<std::size_t>& l,
                             const ZhouBrentOptions& opts) {
  require_slots(l, A.size(), "zhou_brent");
  const double ref = resolve_reference(opts, A);
  const double tol = opts.rho * ref;
  // A pair whose coupling is below this cannot keep the total above tol.
  const double skip = tol / std::max<double>(1.0, static_cast<double>(A.size()));
  SweepStats st;
  st.initial_off = st.final_off = cluster_offschur(A, l);
  double whole = opts.break_on_increase ? offschur(A) : 0.0;
  while (st.final_off > tol) {
    if (st.sweeps >= opts.max_sweeps) break;
    for (std::size_t a = 0; a < l.size(); a += 2)
      for (std::size_t b = a + 2; b < l.size(); b += 2) {
        const std::size_t i = l[a], j = l[b];
        if (slot_coupling(A, i / 2, j / 2) <= skip) continue;
        const std::array<std::size_t, 4> idx{i, i + 1, j, j + 1};
        apply_similarity(A, Q, idx, real_schur_4x4(extract_block(A, idx), opts.ordering).R);
      }
    ++st.sweeps;
    const double off = cluster_offschur(A, l);
    const bool no_progress = stalled_sweep(opts, tol, st.final_off, off);
    st.final_off = off;
    if (opts.break_on_increase) {
      const double w = offschur(A);
      if (w > whole) {
        st.stalled = true;
        break;
      }
      whole = w;
    }
    if (no_progress && opts.stop_on_stall && off > tol) {
      st.stalled = true;
      break;
    }
  }
  st.converged = st.final_off <= tol;
  return st;
}

struct RandDiagResult {
  SweepStats stats;
  double mu1 = 0.0, mu2 = 0.0;
};

// Complex Jacobi diagonalisation of the Hermitian combination
// (mu1/2)(A + A^*) + i (mu2/2)(A - A^*) with random weights; A and Q become complex.
inline RandDiagResult randdiag_jacobi(ComplexMatrix& A, ComplexMatrix& Q, const SweepOptions& opts,
                                      std::uint64_t seed) {
  using cd = std::complex<double>;
  const std::size_t n = A.size();
  if (Q.size() != n) throw std::invalid_argument("randdiag_jacobi: A and Q differ in size");
  CounterRng rng(seed);
  RandDiagResult out;
  out.mu1 = rng.normal();
  out.mu2 = rng.normal();
  const double mu1 = out.mu1, mu2 = out.mu2;
  const cd I(0.0, 1.0);
  auto h_entry = [&](std::size_t i, std::size_t j) {
    const cd a = A(i, j), b = std::conj(A(j, i));
    return 0.5 * mu1 * (a + b) + I * (0.5 * mu2) * (a - b);
  };
  auto h_off = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * std::norm(h_entry(i, j));
    return std::sqrt(s);
  };
  const double ref = opts.reference_norm > 0.0 ? opts.reference_norm : A.frobenius();
  out.stats = run_sweeps(opts, opts.rho * ref, h_off, [&] {
    for (std::size_t i = 0; i + 1 < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const cd h12 = h_entry(i, j);
        const double mag = std::abs(h12);
        if (mag == 0.0) continue;
        const double h11 = std::real(h_entry(i, i)), h22 = std::real(h_entry(j, j));
        const GivensRotation g = jacobi_symmetric_rotation(h11, mag, h22);
        const cd ph = h12 / mag;  // e^{i phi}
        const cd phc = std::conj(ph);
        const double c = g.c, s = g.s;
        cd* ri = A.row_ptr(i);
        cd* rj = A.row_ptr(j);
        for (std::size_t k = 0; k < n; ++k) {
          const cd x = ri[k], y = rj[k];
          ri[k] = c * x + s * ph * y;
          rj[k] = -s * x + c * ph * y;
        }
        for (ComplexMatrix* M : {&A, &Q})
          for (std::size_t r = 0; r < n; ++r) {
            cd* row = M->row_ptr(r);
            const cd x = row[i], y = row[j];
            row[i] = c * x + s * phc * y;
            row[j] = -s * x + c * phc * y;
          }
      }
  });
  return out;
}

}  // namespace normjac
