#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "matrix.hpp"

namespace normjac {

// Conjugate pair radius * exp(+-i phase), phase in (0, pi).
struct ComplexPair {
  double radius = 0.0;
  double phase = 0.0;
  int group = -1;  // index into Spectrum::sigma_groups, -1 when the imaginary part is unshared

  double re() const { return radius * std::cos(phase); }
  double im() const { return radius * std::sin(phase); }

  static ComplexPair from_parts(double re, double im) { return {std::hypot(re, im), std::atan2(std::abs(im), re)}; }
};

struct Spectrum {
  std::vector<ComplexPair> pairs;
  std::vector<double> reals;
  // Pairs sharing an imaginary part; each group has at least two members.
  std::vector<std::vector<std::size_t>> sigma_groups;

  std::size_t dimension() const { return 2 * pairs.size() + reals.size(); }

  std::vector<std::complex<double>> eigenvalues() const {
    std::vector<std::complex<double>> out;
    for (const auto& p : pairs) {
      out.emplace_back(p.re(), p.im());
      out.emplace_back(p.re(), -p.im());
    }
    for (double r : reals) out.emplace_back(r, 0.0);
    return out;
  }
};

// Single-linkage grouping of pairs whose imaginary parts differ by at most tol.
inline void assign_sigma_groups(Spectrum& s, double tol) {
  s.sigma_groups.clear();
  for (auto& p : s.pairs) p.group = -1;
  std::vector<std::size_t> order(s.pairs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return s.pairs[a].im() < s.pairs[b].im(); });
  for (std::size_t k = 0; k < order.size();) {
    std::size_t e = k + 1;
    while (e < order.size() && s.pairs[order[e]].im() - s.pairs[order[e - 1]].im() <= tol) ++e;
    if (e - k >= 2) {
      std::vector<std::size_t> g(order.begin() + static_cast<std::ptrdiff_t>(k), order.begin() + static_cast<std::ptrdiff_t>(e));
      std::sort(g.begin(), g.end());
      for (std::size_t i : g) s.pairs[i].group = static_cast<int>(s.sigma_groups.size());
      s.sigma_groups.push_back(std::move(g));
    }
    k = e;
  }
}

// Block diagonal real Schur form: pairs first as radius * [[c, -s], [s, c]], then reals.
inline DenseMatrix schur_form_from_spectrum(const Spectrum& s) {
  DenseMatrix S(s.dimension());
  std::size_t k = 0;
  for (const auto& p : s.pairs) {
    const double c = p.radius * std::cos(p.phase), sn = p.radius * std::sin(p.phase);
    S(k, k) = c;
    S(k + 1, k + 1) = c;
    S(k, k + 1) = -sn;
    S(k + 1, k) = sn;
    k += 2;
  }
  for (double r : s.reals) {
    S(k, k) = r;
    ++k;
  }
  return S;
}

// Amplification factors of the perturbation analysis. Each is absent when the
// spectrum lacks the structure it describes; every present value is >= 1.
struct PerturbationReport {
  std::optional<double> distinct;   // pairs with distinct imaginary parts
  std::optional<double> repeated;   // pairs sharing an imaginary part
  std::optional<double> real_eigs;  // real eigenvalues next to complex pairs
};

inline PerturbationReport perturbation_factors(const Spectrum& s) {
  PerturbationReport r;
  const double inf = std::numeric_limits<double>::infinity();
  const auto& P = s.pairs;
  if (P.size() >= 2) {
    double worst = 0.0;
    for (std::size_t i = 0; i < P.size(); ++i)
      for (std::size_t j = 0; j < P.size(); ++j) {
        if (i == j) continue;
        const double num = std::abs(P[i].re() - P[j].re()), den = std::abs(P[i].im() - P[j].im());
        worst = std::max(worst, den == 0.0 ? (num == 0.0 ? 0.0 : inf) : num / den);
      }
    r.distinct = 1.0 + worst;
  }
  for (const auto& g : s.sigma_groups) {
    if (g.size() < 2) continue;
    double sigma = 0.0;
    for (std::size_t j : g) sigma += P[j].im();
    sigma /= static_cast<double>(g.size());
    double cross = 0.0, min_gap = inf;
    for (std::size_t i = 0; i < P.size(); ++i) {
      if (std::find(g.begin(), g.end(), i) != g.end()) continue;
      min_gap = std::min(min_gap, std::abs(P[i].im() - sigma));
      for (std::size_t j : g) cross = std::max(cross, std::abs(P[i].re() - P[j].re()));
    }
    const double term1 = std::isinf(min_gap) ? 0.0 : (min_gap == 0.0 ? inf : cross / min_gap);
    double spread = 0.0;
    for (std::size_t a : g)
      for (std::size_t b : g) spread = std::max(spread, std::abs(P[a].re() - P[b].re()));
    const double f = 1.0 + term1 + (sigma == 0.0 ? inf : spread / sigma);
    r.repeated = std::max(r.repeated.value_or(1.0), f);
  }
  if (!s.reals.empty() && !P.empty()) {
    double num = 0.0, den = inf;
    for (const auto& p : P) {
      den = std::min(den, std::abs(p.im()));
      for (double x : s.reals) num = std::max(num, std::abs(p.re() - x));
    }
    r.real_eigs = 1.0 + (den == 0.0 ? inf : num / den);
  }
  return r;
}

// Reads the spectrum off a quasi-diagonal real Schur form. Slots are the 2x2
// blocks (0,1), (2,3), ...; an odd dimension ends with a 1x1 block. A slot is a
// complex pair when its eigenvalues are non-real and its skew part exceeds
// `threshold`; pairs are read as a [[a, -b], [b, a]] block.
struct ExtractedSpectrum {
  Spectrum spectrum;
  double max_block_deviation = 0.0;  // largest |a - d| + |b + c| over complex slots
};

inline ExtractedSpectrum extract_spectrum(const DenseMatrix& S, double threshold, double group_tol) {
  ExtractedSpectrum out;
  const std::size_t n = S.size();
  std::size_t i = 0;
  for (; i + 1 < n; i += 2) {
    const double a = S(i, i), b = S(i, i + 1), c = S(i + 1, i), d = S(i + 1, i + 1);
    const double mid = 0.5 * (a + d), half = 0.5 * (a - d), skew = 0.5 * (c - b);
    const double disc = half * half + b * c;
    if (disc < 0.0 && std::abs(skew) > threshold) {
      out.spectrum.pairs.push_back(ComplexPair::from_parts(mid, skew));
      out.max_block_deviation = std::max(out.max_block_deviation, std::abs(a - d) + std::abs(b + c));
    } else {
      const double h = 0.5 * (b + c);
      const double r = std::hypot(half, h);
      out.spectrum.reals.push_back(mid + r);
      out.spectrum.reals.push_back(mid - r);
    }
  }
  if (i < n) out.spectrum.reals.push_back(S(i, i));
  assign_sigma_groups(out.spectrum, group_tol);
  return out;
}

}  // namespace normjac
