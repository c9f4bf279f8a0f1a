#pragma once

#include <cmath>
#include <queue>
#include <vector>

#include "matrix.hpp"

namespace normjac {

class BoolMatrix {
 public:
  explicit BoolMatrix(std::size_t n = 0) : n_(n), bits_(n * n, false) {}
  std::size_t size() const noexcept { return n_; }
  bool operator()(std::size_t i, std::size_t j) const { return bits_[i * n_ + j]; }
  void set(std::size_t i, std::size_t j, bool v = true) { bits_[i * n_ + j] = v; }

 private:
  std::size_t n_;
  std::vector<bool> bits_;
};

// Frobenius norm of the two off-diagonal 2x2 blocks coupling slots a and b.
inline double slot_coupling(const DenseMatrix& A, std::size_t a, std::size_t b) {
  double s = 0.0;
  for (std::size_t i = 2 * a; i < 2 * a + 2; ++i)
    for (std::size_t j = 2 * b; j < 2 * b + 2; ++j) s += A(i, j) * A(i, j) + A(j, i) * A(j, i);
  return std::sqrt(s);
}

// Slots a != b are linked when their coupling strictly exceeds `threshold`; a link
// sets the whole 4x4 pattern on {2a, 2a+1, 2b, 2b+1}.
inline BoolMatrix build_adjacency_threshold(const DenseMatrix& A, double threshold) {
  const std::size_t n = A.size();
  if (n % 2 != 0) throw std::invalid_argument("build_adjacency: dimension must be even");
  BoolMatrix adj(n);
  for (std::size_t a = 0; a < n / 2; ++a)
    for (std::size_t b = a + 1; b < n / 2; ++b) {
      if (!(slot_coupling(A, a, b) > threshold)) continue;
      for (std::size_t i : {2 * a, 2 * a + 1, 2 * b, 2 * b + 1})
        for (std::size_t j : {2 * a, 2 * a + 1, 2 * b, 2 * b + 1}) adj.set(i, j);
    }
  return adj;
}

// Threshold sqrt(rho * ||A||_F).
inline BoolMatrix build_adjacency(const DenseMatrix& A, double rho) {
  return build_adjacency_threshold(A, std::sqrt(rho * frobenius_norm(A)));
}

struct ClusterSet {
  // Each cluster lists whole slots {2a, 2a+1, ...} in ascending order.
  std::vector<std::vector<std::size_t>> clusters;
};

// Breadth-first search over slot nodes. Clusters are ordered by their smallest
// index; unlinked slots form singleton clusters.
inline ClusterSet connected_components(const BoolMatrix& adj) {
  const std::size_t n = adj.size();
  if (n % 2 != 0) throw std::invalid_argument("connected_components: dimension must be even");
  const std::size_t m = n / 2;
  std::vector<bool> seen(m, false);
  ClusterSet out;
  for (std::size_t start = 0; start < m; ++start) {
    if (seen[start]) continue;
    std::vector<std::size_t> slots;
    std::queue<std::size_t> q;
    q.push(start);
    seen[start] = true;
    while (!q.empty()) {
      const std::size_t a = q.front();
      q.pop();
      slots.push_back(a);
      for (std::size_t b = 0; b < m; ++b)
        if (!seen[b] && adj(2 * a, 2 * b)) {
          seen[b] = true;
          q.push(b);
        }
    }
    std::sort(slots.begin(), slots.end());
    std::vector<std::size_t> idx;
    for (std::size_t a : slots) {
      idx.push_back(2 * a);
      idx.push_back(2 * a + 1);
    }
    out.clusters.push_back(std::move(idx));
  }
  return out;
}

}  // namespace normjac
