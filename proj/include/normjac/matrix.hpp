#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace normjac {

inline constexpr double machine_epsilon = std::numeric_limits<double>::epsilon();
inline constexpr double default_rho = 10.0 * machine_epsilon;

class DenseMatrix {
 public:
  DenseMatrix() = default;
  explicit DenseMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

  DenseMatrix(std::size_t n, std::vector<double> row_major) : n_(n), data_(std::move(row_major)) {
    if (data_.size() != n * n) throw std::invalid_argument("DenseMatrix: entry count is not n*n");
  }

  DenseMatrix(std::initializer_list<std::initializer_list<double>> rows) : n_(rows.size()) {
    data_.reserve(n_ * n_);
    for (const auto& r : rows) {
      if (r.size() != n_) throw std::invalid_argument("DenseMatrix: matrix must be square");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t size() const noexcept { return n_; }

  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * n_ + j]; }

  double* row_ptr(std::size_t i) noexcept { return data_.data() + i * n_; }
  const double* row_ptr(std::size_t i) const noexcept { return data_.data() + i * n_; }

  std::span<double> entries() noexcept { return data_; }
  std::span<const double> entries() const noexcept { return data_; }

  bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
  }

  DenseMatrix transposed() const {
    DenseMatrix t(n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  DenseMatrix submatrix(std::span<const std::size_t> idx) const {
    DenseMatrix s(idx.size());
    for (std::size_t a = 0; a < idx.size(); ++a)
      for (std::size_t b = 0; b < idx.size(); ++b) s(a, b) = (*this)(idx[a], idx[b]);
    return s;
  }

  DenseMatrix& operator+=(const DenseMatrix& o) {
    check_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  DenseMatrix& operator-=(const DenseMatrix& o) {
    check_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  DenseMatrix& operator*=(double s) noexcept {
    for (double& x : data_) x *= s;
    return *this;
  }

  friend DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) { return a += b; }
  friend DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b) { return a -= b; }
  friend DenseMatrix operator*(double s, DenseMatrix a) { return a *= s; }

  friend DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
    a.check_same(b);
    const std::size_t n = a.n_;
    DenseMatrix c(n);
    for (std::size_t i = 0; i < n; ++i) {
      double* ci = c.row_ptr(i);
      for (std::size_t k = 0; k < n; ++k) {
        const double aik = a(i, k);
        if (aik == 0.0) continue;
        const double* bk = b.row_ptr(k);
        for (std::size_t j = 0; j < n; ++j) ci[j] += aik * bk[j];
      }
    }
    return c;
  }

 private:
  void check_same(const DenseMatrix& o) const {
    if (o.n_ != n_) throw std::invalid_argument("DenseMatrix: dimension mismatch");
  }

  std::size_t n_ = 0;
  std::vector<double> data_;
};

// Fixed-size square block, row-major. Used for the 2x2/3x3/4x4 kernels.
template <std::size_t K>
struct Fixed {
  std::array<double, K * K> a{};

  static Fixed identity() {
    Fixed m;
    for (std::size_t i = 0; i < K; ++i) m(i, i) = 1.0;
    return m;
  }
  double& operator()(std::size_t i, std::size_t j) noexcept { return a[i * K + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return a[i * K + j]; }

  Fixed transposed() const {
    Fixed t;
    for (std::size_t i = 0; i < K; ++i)
      for (std::size_t j = 0; j < K; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  friend Fixed operator*(const Fixed& x, const Fixed& y) {
    Fixed z;
    for (std::size_t i = 0; i < K; ++i)
      for (std::size_t k = 0; k < K; ++k) {
        const double xik = x(i, k);
        for (std::size_t j = 0; j < K; ++j) z(i, j) += xik * y(k, j);
      }
    return z;
  }

  double frobenius() const {
    double s = 0.0;
    for (double x : a) s += x * x;
    return std::sqrt(s);
  }
};

template <std::size_t K>
Fixed<K> extract_block(const DenseMatrix& A, const std::array<std::size_t, K>& idx) {
  Fixed<K> m;
  for (std::size_t i = 0; i < K; ++i)
    for (std::size_t j = 0; j < K; ++j) m(i, j) = A(idx[i], idx[j]);
  return m;
}

// Rows idx of A are replaced by G^T * A(idx, :).
template <std::size_t K>
void apply_block_left(DenseMatrix& A, const std::array<std::size_t, K>& idx, const Fixed<K>& G) {
  const std::size_t n = A.size();
  std::array<double*, K> rows;
  for (std::size_t k = 0; k < K; ++k) rows[k] = A.row_ptr(idx[k]);
  for (std::size_t c = 0; c < n; ++c) {
    std::array<double, K> x;
    for (std::size_t k = 0; k < K; ++k) x[k] = rows[k][c];
    for (std::size_t r = 0; r < K; ++r) {
      double s = 0.0;
      for (std::size_t k = 0; k < K; ++k) s += G(k, r) * x[k];
      rows[r][c] = s;
    }
  }
}

// Columns idx of A are replaced by A(:, idx) * G.
template <std::size_t K>
void apply_block_right(DenseMatrix& A, const std::array<std::size_t, K>& idx, const Fixed<K>& G) {
  const std::size_t n = A.size();
  for (std::size_t r = 0; r < n; ++r) {
    double* row = A.row_ptr(r);
    std::array<double, K> y;
    for (std::size_t k = 0; k < K; ++k) y[k] = row[idx[k]];
    for (std::size_t c = 0; c < K; ++c) {
      double s = 0.0;
      for (std::size_t k = 0; k < K; ++k) s += y[k] * G(k, c);
      row[idx[c]] = s;
    }
  }
}

// A <- G^T A G restricted to idx, and Q <- Q G.
template <std::size_t K>
void apply_similarity(DenseMatrix& A, DenseMatrix& Q, const std::array<std::size_t, K>& idx,
                      const Fixed<K>& G) {
  apply_block_left(A, idx, G);
  apply_block_right(A, idx, G);
  apply_block_right(Q, idx, G);
}

// G(alpha, i, j): identity except G_ii = G_jj = c, G_ij = -s, G_ji = s.
struct GivensRotation {
  std::size_t i = 0;
  std::size_t j = 1;
  double c = 1.0;
  double s = 0.0;

  static GivensRotation from_angle(std::size_t i, std::size_t j, double alpha) {
    return {i, j, std::cos(alpha), std::sin(alpha)};
  }
  double angle() const { return std::atan2(s, c); }
};

// A <- G^T A
inline void apply_givens_left(DenseMatrix& A, const GivensRotation& g) {
  const std::size_t n = A.size();
  if (g.i >= n || g.j >= n || g.i == g.j) throw std::out_of_range("apply_givens_left: bad plane");
  double* ri = A.row_ptr(g.i);
  double* rj = A.row_ptr(g.j);
  for (std::size_t k = 0; k < n; ++k) {
    const double x = ri[k], y = rj[k];
    ri[k] = g.c * x + g.s * y;
    rj[k] = -g.s * x + g.c * y;
  }
}

// A <- A G
inline void apply_givens_right(DenseMatrix& A, const GivensRotation& g) {
  const std::size_t n = A.size();
  if (g.i >= n || g.j >= n || g.i == g.j) throw std::out_of_range("apply_givens_right: bad plane");
  for (std::size_t r = 0; r < n; ++r) {
    double* row = A.row_ptr(r);
    const double x = row[g.i], y = row[g.j];
    row[g.i] = g.c * x + g.s * y;
    row[g.j] = -g.s * x + g.c * y;
  }
}

inline void apply_givens_similarity(DenseMatrix& A, DenseMatrix& Q, const GivensRotation& g) {
  apply_givens_left(A, g);
  apply_givens_right(A, g);
  apply_givens_right(Q, g);
}

// Column k of the permutation matrix P is e_{map[k]}, i.e. P(map[k], k) = 1.
struct Permutation {
  std::vector<std::size_t> map;

  std::size_t size() const noexcept { return map.size(); }

  bool valid() const {
    std::vector<bool> seen(map.size(), false);
    for (std::size_t m : map) {
      if (m >= map.size() || seen[m]) return false;
      seen[m] = true;
    }
    return true;
  }

  DenseMatrix matrix() const {
    DenseMatrix P(map.size());
    for (std::size_t k = 0; k < map.size(); ++k) P(map[k], k) = 1.0;
    return P;
  }

  // P^T A P
  DenseMatrix conjugate(const DenseMatrix& A) const {
    const std::size_t n = map.size();
    if (A.size() != n) throw std::invalid_argument("Permutation::conjugate: size mismatch");
    DenseMatrix B(n);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) B(a, b) = A(map[a], map[b]);
    return B;
  }

  Permutation inverse() const {
    Permutation p{std::vector<std::size_t>(map.size())};
    for (std::size_t k = 0; k < map.size(); ++k) p.map[map[k]] = k;
    return p;
  }
};

// For 2m indices: odd positions first, then even ones (1-based): (1,3,...,2m-1,2,4,...,2m).
inline Permutation even_odd_permutation(std::size_t n) {
  if (n % 2 != 0) throw std::invalid_argument("even_odd_permutation: n must be even");
  Permutation p{std::vector<std::size_t>(n)};
  const std::size_t m = n / 2;
  for (std::size_t k = 0; k < m; ++k) {
    p.map[k] = 2 * k;
    p.map[m + k] = 2 * k + 1;
  }
  return p;
}

inline double frobenius_norm(const DenseMatrix& A) {
  double s = 0.0;
  for (double x : A.entries()) s += x * x;
  return std::sqrt(s);
}

inline double frobenius_inner(const DenseMatrix& A, const DenseMatrix& B) {
  if (A.size() != B.size()) throw std::invalid_argument("frobenius_inner: size mismatch");
  return std::inner_product(A.entries().begin(), A.entries().end(), B.entries().begin(), 0.0);
}

inline DenseMatrix sym_part(const DenseMatrix& A) {
  const std::size_t n = A.size();
  DenseMatrix H(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) H(i, j) = 0.5 * (A(i, j) + A(j, i));
  return H;
}

inline DenseMatrix skew_part(const DenseMatrix& A) {
  const std::size_t n = A.size();
  DenseMatrix W(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) W(i, j) = 0.5 * (A(i, j) - A(j, i));
  return W;
}

// Slot of index i: the 2x2 diagonal block {2*floor(i/2), 2*floor(i/2)+1}. An odd
// dimension leaves the last index as a trailing 1x1 slot.
inline bool same_slot(std::size_t i, std::size_t j) noexcept { return i / 2 == j / 2; }

// Frobenius norm of everything outside the 2x2 diagonal blocks.
inline double offschur(const DenseMatrix& A) {
  const std::size_t n = A.size();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = A.row_ptr(i);
    for (std::size_t j = 0; j < n; ++j)
      if (!same_slot(i, j)) s += row[j] * row[j];
  }
  return std::sqrt(s);
}

// offschur(skew_part(A)) without forming the skew part.
inline double offschur_skew(const DenseMatrix& A) {
  const std::size_t n = A.size();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = (i / 2 + 1) * 2; j < n; ++j) {
      const double w = 0.5 * (A(i, j) - A(j, i));
      s += 2.0 * w * w;
    }
  return std::sqrt(s);
}

inline double offdiag(const DenseMatrix& A) {
  const std::size_t n = A.size();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) s += A(i, j) * A(i, j);
  return std::sqrt(s);
}

inline double orthogonality_residual(const DenseMatrix& Q) {
  DenseMatrix E = Q.transposed() * Q;
  for (std::size_t i = 0; i < Q.size(); ++i) E(i, i) -= 1.0;
  return frobenius_norm(E);
}

// ||A - Q S Q^T||_F
inline double reconstruction_residual(const DenseMatrix& A, const DenseMatrix& Q, const DenseMatrix& S) {
  return frobenius_norm(A - Q * S * Q.transposed());
}

// Householder QR of a square matrix. Returns (Q, R) with A = Q R.
struct QrFactors {
  DenseMatrix Q;
  DenseMatrix R;
};

inline QrFactors householder_qr(const DenseMatrix& A) {
  const std::size_t n = A.size();
  DenseMatrix R = A;
  DenseMatrix Q = DenseMatrix::identity(n);
  std::vector<double> v(n);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    double norm = 0.0;
    for (std::size_t i = k; i < n; ++i) norm += R(i, k) * R(i, k);
    norm = std::sqrt(norm);
    if (norm == 0.0) continue;
    const double alpha = R(k, k) >= 0.0 ? -norm : norm;
    for (std::size_t i = 0; i < n; ++i) v[i] = i < k ? 0.0 : R(i, k);
    v[k] -= alpha;
    double vv = 0.0;
    for (std::size_t i = k; i < n; ++i) vv += v[i] * v[i];
    if (vv == 0.0) continue;
    for (std::size_t j = 0; j < n; ++j) {
      double d = 0.0;
      for (std::size_t i = k; i < n; ++i) d += v[i] * R(i, j);
      d *= 2.0 / vv;
      for (std::size_t i = k; i < n; ++i) R(i, j) -= d * v[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
      double d = 0.0;
      for (std::size_t j = k; j < n; ++j) d += Q(i, j) * v[j];
      d *= 2.0 / vv;
      for (std::size_t j = k; j < n; ++j) Q(i, j) -= d * v[j];
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) R(i, j) = 0.0;
  return {std::move(Q), std::move(R)};
}

class ComplexMatrix {
 public:
  using value_type = std::complex<double>;

  ComplexMatrix() = default;
  explicit ComplexMatrix(std::size_t n) : n_(n), data_(n * n) {}

  static ComplexMatrix identity(std::size_t n) {
    ComplexMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static ComplexMatrix from_real(const DenseMatrix& A) {
    ComplexMatrix m(A.size());
    for (std::size_t i = 0; i < A.size(); ++i)
      for (std::size_t j = 0; j < A.size(); ++j) m(i, j) = A(i, j);
    return m;
  }

  std::size_t size() const noexcept { return n_; }
  value_type& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * n_ + j]; }
  const value_type& operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * n_ + j]; }
  value_type* row_ptr(std::size_t i) noexcept { return data_.data() + i * n_; }

  ComplexMatrix adjoint() const {
    ComplexMatrix t(n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) t(j, i) = std::conj((*this)(i, j));
    return t;
  }

  double frobenius() const {
    double s = 0.0;
    for (const auto& z : data_) s += std::norm(z);
    return std::sqrt(s);
  }

  double offdiag() const {
    double s = 0.0;
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j)
        if (i != j) s += std::norm((*this)(i, j));
    return std::sqrt(s);
  }

  ComplexMatrix& operator-=(const ComplexMatrix& o) {
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  ComplexMatrix& operator+=(const ComplexMatrix& o) {
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  ComplexMatrix& operator*=(value_type s) {
    for (auto& z : data_) z *= s;
    return *this;
  }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
  friend ComplexMatrix operator*(value_type s, ComplexMatrix a) { return a *= s; }

  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.n_ != b.n_) throw std::invalid_argument("ComplexMatrix: dimension mismatch");
    const std::size_t n = a.n_;
    ComplexMatrix c(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) {
        const value_type aik = a(i, k);
        for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

 private:
  std::size_t n_ = 0;
  std::vector<value_type> data_;
};

}  // namespace normjac
