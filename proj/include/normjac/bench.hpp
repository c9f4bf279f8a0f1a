#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <optional>
#include <string_view>
#include <vector>

#include "driver.hpp"
#include "generic_jacobi.hpp"

namespace normjac {

enum class SolverId { Alg2, Zhou, RandDiag };

inline std::string_view solver_name(SolverId s) {
  switch (s) {
    case SolverId::Alg2: return "alg2";
    case SolverId::Zhou: return "zhou";
    case SolverId::RandDiag: return "randdiag";
  }
  return "?";
}

inline std::optional<SolverId> parse_solver(std::string_view s) {
  for (auto id : {SolverId::Alg2, SolverId::Zhou, SolverId::RandDiag})
    if (solver_name(id) == s) return id;
  return std::nullopt;
}

struct SolverRun {
  double ratio = 0.0;    // off-norm of the final matrix over ||A||_F
  double seconds = 0.0;  // solver only, no generation or I/O
  int sweeps = 0;
  bool converged = false;
};

// Zero row and column appended when n is odd, as the pipeline does.
inline DenseMatrix pad_even(const DenseMatrix& A) {
  if (A.size() % 2 == 0) return A;
  DenseMatrix P(A.size() + 1);
  for (std::size_t i = 0; i < A.size(); ++i)
    for (std::size_t j = 0; j < A.size(); ++j) P(i, j) = A(i, j);
  return P;
}

// alg2 and zhou report offschur(S); randdiag reports offdiag of the complex result.
inline SolverRun run_solver(SolverId id, const DenseMatrix& A, double rho, std::uint64_t seed, int max_sweeps = 30) {
  using clock = std::chrono::steady_clock;
  SolverRun out;
  const double ref = std::max(frobenius_norm(A), 1e-300);
  switch (id) {
    case SolverId::Alg2: {
      Config cfg;
      cfg.rho = rho;
      cfg.max_sweeps = max_sweeps;
      const auto t0 = clock::now();
      const SchurResult r = decompose(A, cfg);
      out.seconds = std::chrono::duration<double>(clock::now() - t0).count();
      out.ratio = r.offschur_ratio;
      out.converged = r.converged;
      for (const auto& s : r.steps) out.sweeps += s.stats.sweeps;
      break;
    }
    case SolverId::Zhou: {
      DenseMatrix W = pad_even(A);
      DenseMatrix Q = DenseMatrix::identity(W.size());
      std::vector<std::size_t> all(W.size());
      std::iota(all.begin(), all.end(), std::size_t{0});
      ZhouBrentOptions zo;
      zo.rho = rho;
      zo.max_sweeps = max_sweeps;
      zo.reference_norm = ref;
      const auto t0 = clock::now();
      const SweepStats st = zhou_brent(W, Q, all, zo);
      out.seconds = std::chrono::duration<double>(clock::now() - t0).count();
      out.ratio = offschur(W) / ref;
      out.sweeps = st.sweeps;
      out.converged = st.converged;
      break;
    }
    case SolverId::RandDiag: {
      ComplexMatrix W = ComplexMatrix::from_real(A);
      ComplexMatrix Q = ComplexMatrix::identity(A.size());
      SweepOptions so;
      so.rho = rho;
      so.max_sweeps = max_sweeps;
      so.reference_norm = ref;
      const auto t0 = clock::now();
      const RandDiagResult r = randdiag_jacobi(W, Q, so, seed);
      out.seconds = std::chrono::duration<double>(clock::now() - t0).count();
      out.ratio = W.offdiag() / ref;
      out.sweeps = r.stats.sweeps;
      out.converged = r.stats.converged;
      break;
    }
  }
  return out;
}

inline double geometric_mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += std::log(std::max(x, 1e-300));
  return std::exp(s / static_cast<double>(v.size()));
}

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace normjac
