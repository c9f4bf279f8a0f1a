// Build a normal matrix with a known spectrum, decompose it, and print what comes back.

#include <cstdio>

#include "normjac/driver.hpp"
#include "normjac/genmat.hpp"

int main() {
  using namespace normjac;

  Spectrum sp;
  sp.pairs = {ComplexPair::from_parts(1.0, 2.0), ComplexPair::from_parts(-0.5, 2.0), ComplexPair::from_parts(3.0, 0.25)};
  sp.reals = {-1.0, 4.0};
  const DenseMatrix V = haar_orthogonal(sp.dimension(), 42);
  const DenseMatrix A = V * schur_form_from_spectrum(sp) * V.transposed();

  const SchurResult r = decompose(A);
  std::printf("n = %zu, converged = %s\n", A.size(), r.converged ? "yes" : "no");
  std::printf("offschur(S)/||A|| = %.2e  ||Q^T Q - I|| = %.2e  ||A - Q S Q^T||/||A|| = %.2e\n", r.offschur_ratio,
              r.ortho_residual, r.reconstruction_residual);
  for (const auto& s : r.steps)
    std::printf("step %-4s sweeps %d%s\n", std::string(step_name(s.kind)).c_str(), s.stats.sweeps,
                s.cluster.empty() ? "" : (" on " + std::to_string(s.cluster.size()) + " indices").c_str());
  for (const auto& z : r.spectrum.eigenvalues()) std::printf("  %+.15f %+.15fi\n", z.real(), z.imag());
  return r.converged ? 0 : 2;
}
