#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "matrix.hpp"
#include "rng.hpp"
#include "spectrum.hpp"

namespace normjac {

// Q R factorisation of a Gaussian matrix with the signs of diag(R) moved into Q.
inline DenseMatrix haar_orthogonal(std::size_t n, CounterRng& rng) {
  if (n == 0) throw std::invalid_argument("haar_orthogonal: n must be positive");
  DenseMatrix G(n);
  for (double& x : G.entries()) x = rng.normal();
  QrFactors f = householder_qr(G);
  for (std::size_t k = 0; k < n; ++k)
    if (f.R(k, k) < 0.0)
      for (std::size_t i = 0; i < n; ++i) f.Q(i, k) = -f.Q(i, k);
  return std::move(f.Q);
}

inline DenseMatrix haar_orthogonal(std::size_t n, std::uint64_t seed) {
  CounterRng rng(seed);
  return haar_orthogonal(n, rng);
}

enum class EnsembleClass { Exp1, Exp2, Exp3, Exp4, Exp5, AlphaFamily, Fig1 };

inline std::string_view class_name(EnsembleClass c) {
  switch (c) {
    case EnsembleClass::Exp1: return "Exp1";
    case EnsembleClass::Exp2: return "Exp2";
    case EnsembleClass::Exp3: return "Exp3";
    case EnsembleClass::Exp4: return "Exp4";
    case EnsembleClass::Exp5: return "Exp5";
    case EnsembleClass::AlphaFamily: return "AlphaFamily";
    case EnsembleClass::Fig1: return "Fig1";
  }
  return "?";
}

inline std::optional<EnsembleClass> parse_class(std::string_view s) {
  for (auto c : {EnsembleClass::Exp1, EnsembleClass::Exp2, EnsembleClass::Exp3, EnsembleClass::Exp4,
                 EnsembleClass::Exp5, EnsembleClass::AlphaFamily, EnsembleClass::Fig1})
    if (class_name(c) == s) return c;
  return std::nullopt;
}

struct EnsembleSpec {
  EnsembleClass cls = EnsembleClass::Exp2;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double alpha1 = 0.0;  // AlphaFamily: fraction of real eigenvalues
  double alpha2 = 0.0;  // AlphaFamily: fraction of eigenvalues with a shared imaginary part
  int sigma_groups = 1;  // Exp4: number of distinct shared imaginary parts
};

struct GroundTruth {
  EnsembleSpec spec;
  DenseMatrix A, Q, S;  // A = Q S Q^T
  Spectrum spectrum;
  std::size_t real_count = 0;       // realised number of real eigenvalues
  std::size_t repeated_pairs = 0;   // realised number of pairs with a shared imaginary part
  std::vector<std::string> expected_steps;  // steps the instance is built to exercise
};

namespace detail {

// Nearest count to target with n - count even.
inline std::size_t realisable_reals(double target, std::size_t n) {
  const auto r0 = static_cast<long long>(std::llround(target));
  long long best = -1;
  double best_d = 0.0;
  for (long long r = std::max(0LL, r0 - 1); r <= std::min<long long>(static_cast<long long>(n), r0 + 1); ++r) {
    if ((static_cast<long long>(n) - r) % 2 != 0) continue;
    const double d = std::abs(static_cast<double>(r) - target);
    if (best < 0 || d < best_d) {
      best = r;
      best_d = d;
    }
  }
  return static_cast<std::size_t>(best);
}

inline ComplexPair uniform_phase_pair(CounterRng& rng, double radius) {
  double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
  if (phase > std::numbers::pi) phase = 2.0 * std::numbers::pi - phase;
  return {radius, phase};
}

inline double exp2_radius(CounterRng& rng) { return std::max(rng.uniform(0.0, 2.0), 1e-6); }

}  // namespace detail

inline Spectrum fig1_spectrum(CounterRng& rng, std::vector<std::string>& expected);

inline GroundTruth generate(const EnsembleSpec& spec) {
  GroundTruth t;
  t.spec = spec;
  const std::size_t n = spec.cls == EnsembleClass::Fig1 ? 26 : spec.n;
  if (n == 0) throw std::invalid_argument("generate: n must be positive");
  t.spec.n = n;
  CounterRng rng(spec.seed);
  Spectrum& s = t.spectrum;
  const double pi = std::numbers::pi;

  auto odd_real = [&](double value) {
    if (n % 2 != 0) s.reals.push_back(value);
  };

  switch (spec.cls) {
    case EnsembleClass::Exp1:
      for (std::size_t k = 0; k < n / 2; ++k) s.pairs.push_back(detail::uniform_phase_pair(rng, 1.0));
      odd_real(rng.uniform() < 0.5 ? -1.0 : 1.0);
      break;
    case EnsembleClass::Exp2:
      for (std::size_t k = 0; k < n / 2; ++k) s.pairs.push_back(detail::uniform_phase_pair(rng, detail::exp2_radius(rng)));
      odd_real(rng.normal());
      break;
    case EnsembleClass::Exp3: {
      const std::size_t r = detail::realisable_reals(0.3 * static_cast<double>(n), n);
      for (std::size_t k = 0; k < r; ++k) s.reals.push_back(rng.normal());
      for (std::size_t k = 0; k < (n - r) / 2; ++k)
        s.pairs.push_back(detail::uniform_phase_pair(rng, detail::exp2_radius(rng)));
      break;
    }
    case EnsembleClass::Exp4: {
      if (n < 4) throw std::invalid_argument("generate: Exp4 needs n >= 4");
      const int groups = std::max(1, spec.sigma_groups);
      std::size_t k = std::max<std::size_t>(2 * static_cast<std::size_t>(groups),
                                            static_cast<std::size_t>(std::llround(0.15 * static_cast<double>(n))));
      k = std::min(k, n / 2);
      std::vector<double> sigmas;
      for (int g = 0; g < groups; ++g) sigmas.push_back(std::abs(rng.normal()));
      for (std::size_t j = 0; j < k; ++j)
        s.pairs.push_back(ComplexPair::from_parts(rng.normal(), sigmas[j % sigmas.size()]));
      t.repeated_pairs = k;
      for (std::size_t j = k; j < n / 2; ++j)
        s.pairs.push_back(detail::uniform_phase_pair(rng, detail::exp2_radius(rng)));
      odd_real(rng.normal());
      break;
    }
    case EnsembleClass::Exp5:
      for (std::size_t k = 0; k < n / 2; ++k) {
        const double radius = detail::exp2_radius(rng);
        const double phase = std::abs(pi * std::sqrt(machine_epsilon) * rng.normal(1.0, 1.0));
        s.pairs.push_back({radius, phase});
      }
      odd_real(rng.normal());
      break;
    case EnsembleClass::AlphaFamily: {
      if (spec.alpha1 < 0.0 || spec.alpha2 < 0.0 || spec.alpha1 + spec.alpha2 > 1.0)
        throw std::invalid_argument("generate: alpha1, alpha2 must be non-negative with alpha1 + alpha2 <= 1");
      const std::size_t r = detail::realisable_reals(spec.alpha1 * static_cast<double>(n), n);
      const auto k = static_cast<std::size_t>(std::llround(spec.alpha2 * static_cast<double>(n) / 2.0));
      if (r + 2 * k > n) throw std::invalid_argument("generate: alpha fractions exceed n");
      for (std::size_t j = 0; j < r; ++j) s.reals.push_back(rng.normal());
      const double sigma = std::abs(rng.normal());
      for (std::size_t j = 0; j < k; ++j) s.pairs.push_back(ComplexPair::from_parts(rng.normal(), sigma));
      t.repeated_pairs = k;
      for (std::size_t j = 0; j < (n - r - 2 * k) / 2; ++j) {
        const double re = rng.normal();
        s.pairs.push_back(ComplexPair::from_parts(re, rng.normal()));
      }
      break;
    }
    case EnsembleClass::Fig1:
      s = fig1_spectrum(rng, t.expected_steps);
      t.repeated_pairs = 3;
      break;
  }
  t.real_count = s.reals.size();
  // Shared imaginary parts differ only by the rounding of the polar form.
  double im_max = 1.0;
  for (const auto& p : s.pairs) im_max = std::max(im_max, std::abs(p.im()));
  assign_sigma_groups(s, 16.0 * machine_epsilon * im_max);
  t.S = schur_form_from_spectrum(s);
  t.Q = haar_orthogonal(n, rng);
  t.A = t.Q * t.S * t.Q.transposed();
  return t;
}

// 26 x 26 instance exercising every step of the pipeline:
//   3 pairs sharing one imaginary part                 -> II.1
//   6 real eigenvalues                                  -> II.2
//   3 pairs with imaginary gaps of order sqrt(eps)      -> II.3
//   3 pairs with imaginary gaps of order eps^(1/4)      -> III
//   1 isolated pair
inline Spectrum fig1_spectrum(CounterRng& rng, std::vector<std::string>& expected) {
  Spectrum s;
  const double eps = machine_epsilon;
  for (int k = 0; k < 3; ++k) s.pairs.push_back(ComplexPair::from_parts(rng.normal(), 1.0));
  for (int k = 0; k < 6; ++k) s.reals.push_back(rng.normal());
  // real parts far apart so step I leaves the slots coupled
  double im = 2.0;
  for (int k = 0; k < 3; ++k) {
    s.pairs.push_back(ComplexPair::from_parts(60.0 * (k - 1), im));
    im += rng.uniform(20.0, 60.0) * std::sqrt(eps);
  }
  im = 3.0;
  for (int k = 0; k < 3; ++k) {
    s.pairs.push_back(ComplexPair::from_parts(rng.normal(), im));
    im += rng.uniform(1.0, 10.0) * std::pow(eps, 0.25);
  }
  s.pairs.push_back(ComplexPair::from_parts(rng.normal(), 4.0));
  expected = {"I.1", "II.1", "II.2", "II.3", "III"};
  return s;
}

}  // namespace normjac
