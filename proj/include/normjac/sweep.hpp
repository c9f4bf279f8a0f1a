#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "matrix.hpp"

namespace normjac {

struct SweepOptions {
  double rho = default_rho;
  int max_sweeps = 30;
  // Norm the stopping test is scaled by. Non-positive means ||A||_F at entry.
  double reference_norm = -1.0;
  // Stop when a full sweep fails to decrease the monitored off-norm or, once it is
  // below sqrt(rho) * reference (the locally quadratic regime), to cut it to
  // stall_ratio of its previous value. Either means rounding errors dominate.
  bool stop_on_stall = true;
  double stall_ratio = 0.9;
};

struct SweepStats {
  int sweeps = 0;
  double initial_off = 0.0;
  double final_off = 0.0;
  bool converged = false;
  bool stalled = false;
};

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline double resolve_reference(const SweepOptions& opts, const DenseMatrix& A) {
  return opts.reference_norm > 0.0 ? opts.reference_norm : frobenius_norm(A);
}

inline bool stalled_sweep(const SweepOptions& opts, double tol, double before, double after) {
  if (!(after < before)) return true;
  const bool local = opts.rho > 0.0 && after <= tol / std::sqrt(opts.rho);
  return local && !(after < opts.stall_ratio * before);
}

// Runs `sweep` until `measure` is at most tol. Shared loop of every cyclic solver here.
template <class Measure, class Sweep>
SweepStats run_sweeps(const SweepOptions& opts, double tol, Measure&& measure, Sweep&& sweep) {
  SweepStats st;
  st.initial_off = st.final_off = measure();
  while (st.final_off > tol) {
    if (st.sweeps >= opts.max_sweeps) return st;
    sweep();
    ++st.sweeps;
    const double off = measure();
    const bool stall = stalled_sweep(opts, tol, st.final_off, off);
    st.final_off = off;
    if (stall && opts.stop_on_stall && off > tol) {
      st.stalled = true;
      return st;
    }
  }
  st.converged = true;
  return st;
}

}  // namespace normjac
