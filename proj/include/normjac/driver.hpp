#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "clustering.hpp"
#include "generic_jacobi.hpp"
#include "matrix.hpp"
#include "skew_schur.hpp"
#include "spectrum.hpp"
#include "structured.hpp"
#include "sweep.hpp"

namespace normjac {

enum class StepKind { I1, II1, II2, II3, III };

inline std::string_view step_name(StepKind k) {
  switch (k) {
    case StepKind::I1: return "I.1";
    case StepKind::II1: return "II.1";
    case StepKind::II2: return "II.2";
    case StepKind::II3: return "II.3";
    case StepKind::III: return "III";
  }
  return "?";
}

struct StepRecord {
  StepKind kind = StepKind::I1;
  std::vector<std::size_t> cluster;  // 0-based indices; empty for whole-matrix steps
  SweepStats stats;
  double sigma = 0.0;      // II.1: shared imaginary part removed before the SSkH solve
  double sskh_gap = 0.0;   // II.1: distance of the shifted block from the SSkH set
  double skew_norm = 0.0;  // II.2 / II.3: ||skew(A_ll)||_F after step I
};

struct Config {
  double rho = default_rho;
  int max_sweeps = 30;
  PaardekooperVariant variant = PaardekooperVariant::Implicit;
  // Called with "I", "II" and "III" after the respective step, on the working matrix.
  std::function<void(std::string_view, const DenseMatrix&)> snapshot;
};

struct SchurResult {
  DenseMatrix Q, S;
  Spectrum spectrum;
  PerturbationReport perturbation;
  std::vector<StepRecord> steps;
  bool converged = false;
  double rho = default_rho;
  double norm = 0.0;  // ||A||_F
  double offschur_ratio = 0.0;
  double ortho_residual = 0.0;
  double reconstruction_residual = 0.0;  // ||A - Q S Q^T||_F / ||A||_F
  double max_block_deviation = 0.0;

  bool ran(StepKind k) const {
    return std::any_of(steps.begin(), steps.end(), [k](const StepRecord& r) { return r.kind == k; });
  }
  int sweeps(StepKind k) const {
    int s = 0;
    for (const auto& r : steps)
      if (r.kind == k) s += r.stats.sweeps;
    return s;
  }
};

namespace detail {

inline void flip_index(DenseMatrix& A, DenseMatrix& Q, std::size_t k) {
  const std::size_t n = A.size();
  for (std::size_t j = 0; j < n; ++j) A(k, j) = -A(k, j);
  for (std::size_t i = 0; i < n; ++i) {
    A(i, k) = -A(i, k);
    Q(i, k) = -Q(i, k);
  }
}

// Conjugates every slot with a negative skew subdiagonal by diag(1, -1).
inline void normalise_slot_signs(DenseMatrix& A, DenseMatrix& Q) {
  for (std::size_t i = 0; i + 1 < A.size(); i += 2)
    if (A(i + 1, i) - A(i, i + 1) < 0.0) flip_index(A, Q, i + 1);
}

// Removes the zero row/column appended for odd n. Row `last` of Q is a null
// vector of S; it is rotated onto a single column k, which is then dropped
// together with row `last`, and the other index of k's slot is moved to the end.
inline void strip_padding(DenseMatrix& S, DenseMatrix& Q) {
  const std::size_t np = S.size(), last = np - 1;
  std::size_t k = 0;
  for (std::size_t t = 1; t < np; ++t)
    if (std::abs(Q(last, t)) > std::abs(Q(last, k))) k = t;
  for (std::size_t t = 0; t < np; ++t) {
    if (t == k || Q(last, t) == 0.0) continue;
    const double x = Q(last, k), y = Q(last, t), h = std::hypot(x, y);
    const GivensRotation g{k, t, x / h, y / h};
    apply_givens_similarity(S, Q, g);
    Q(last, t) = 0.0;
  }
  const std::size_t partner = k ^ 1;
  std::vector<std::size_t> order;
  for (std::size_t t = 0; t < np; ++t)
    if (t != k && t != partner) order.push_back(t);
  order.push_back(partner);
  const std::size_t n = np - 1;
  DenseMatrix S2(n), Q2(n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      S2(a, b) = S(order[a], order[b]);
      Q2(a, b) = Q(a, order[b]);
    }
  S = std::move(S2);
  Q = std::move(Q2);
}

}  // namespace detail

// Real Schur decomposition A = Q S Q^T of a real normal matrix.
//   I    Paardekooper sweeps on skew(A), applied implicitly to A
//   II   per cluster of coupled slots: SSkH Jacobi (II.1), symmetric Jacobi (II.2)
//        or Zhou-Brent with a relaxed tolerance (II.3)
//   III  Zhou-Brent on the whole matrix if offschur(A) still exceeds rho ||A||_F
inline SchurResult decompose(const DenseMatrix& A_in, const Config& cfg = {}) {
  const std::size_t n = A_in.size();
  if (n == 0) throw std::invalid_argument("decompose: empty matrix");
  if (!A_in.all_finite()) throw std::invalid_argument("decompose: matrix contains non-finite entries");
  if (!(cfg.rho > 0.0)) throw std::invalid_argument("decompose: rho must be positive");

  const bool padded = n % 2 != 0;
  DenseMatrix A(padded ? n + 1 : n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) A(i, j) = A_in(i, j);
  const std::size_t np = A.size();
  DenseMatrix Q = DenseMatrix::identity(np);

  SchurResult res;
  res.rho = cfg.rho;
  res.norm = frobenius_norm(A_in);
  const double ref = res.norm;
  const double rho = cfg.rho;
  const double loose = std::sqrt(rho * ref);

  SweepOptions base;
  base.rho = rho;
  base.max_sweeps = cfg.max_sweeps;
  base.reference_norm = ref > 0.0 ? ref : 1.0;
  if (ref == 0.0) base.rho = 0.0;

  StepRecord s1;
  s1.kind = StepKind::I1;
  s1.stats = paardekooper_until(A, Q, base, cfg.variant);
  res.steps.push_back(s1);
  detail::normalise_slot_signs(A, Q);
  if (cfg.snapshot) cfg.snapshot("I", A);

  const ClusterSet clusters = connected_components(build_adjacency_threshold(A, loose));
  for (const auto& l : clusters.clusters) {
    StepRecord rec;
    rec.cluster = l;
    rec.skew_norm = skew_norm(A, l);
    double sigma = 0.0;
    for (std::size_t a = 0; a < l.size(); a += 2) sigma += 0.5 * (A(l[a] + 1, l[a]) - A(l[a], l[a] + 1));
    rec.sigma = sigma / static_cast<double>(l.size() / 2);
    rec.sskh_gap = sskh_gap(A, l, rec.sigma);
    if (l.size() >= 4 && rec.sskh_gap <= loose) {
      rec.kind = StepKind::II1;
      rec.stats = sskh_jacobi(A, Q, l, base);
    } else if (rec.skew_norm < loose) {
      rec.kind = StepKind::II2;
      rec.stats = symmetric_jacobi(A, Q, l, base);
    } else if (l.size() >= 4) {
      ZhouBrentOptions zo;
      static_cast<SweepOptions&>(zo) = base;
      zo.rho = std::sqrt(base.rho);
      zo.max_sweeps = static_cast<int>(5 * l.size());
      zo.break_on_increase = true;
      zo.stop_on_stall = false;
      zo.ordering = SchurOrdering::Nearest;
      rec.kind = StepKind::II3;
      rec.stats = zhou_brent(A, Q, l, zo);
    } else {
      continue;  // a lone slot holding a complex pair is already resolved
    }
    res.steps.push_back(std::move(rec));
  }
  if (cfg.snapshot) cfg.snapshot("II", A);

  if (offschur(A) > base.rho * base.reference_norm) {
    ZhouBrentOptions zo;
    static_cast<SweepOptions&>(zo) = base;
    zo.ordering = SchurOrdering::Nearest;
    std::vector<std::size_t> all(np);
    std::iota(all.begin(), all.end(), std::size_t{0});
    StepRecord rec;
    rec.kind = StepKind::III;
    rec.stats = zhou_brent(A, Q, all, zo);
    res.steps.push_back(std::move(rec));
    if (cfg.snapshot) cfg.snapshot("III", A);
  }
  detail::normalise_slot_signs(A, Q);
  res.converged = offschur(A) <= base.rho * base.reference_norm;

  if (padded) detail::strip_padding(A, Q);
  res.S = std::move(A);
  res.Q = std::move(Q);

  const double scale = ref > 0.0 ? ref : 1.0;
  ExtractedSpectrum ex = extract_spectrum(res.S, rho * scale, std::sqrt(rho) * scale);
  res.spectrum = std::move(ex.spectrum);
  res.max_block_deviation = ex.max_block_deviation;
  res.perturbation = perturbation_factors(res.spectrum);
  res.offschur_ratio = offschur(res.S) / scale;
  res.ortho_residual = orthogonality_residual(res.Q);
  res.reconstruction_residual = reconstruction_residual(A_in, res.Q, res.S) / scale;
  return res;
}

}  // namespace normjac
