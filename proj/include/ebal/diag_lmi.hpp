#pragma once

#include "ebal/core.hpp"

#include <functional>
#include <vector>

namespace ebal {

// min c^T y  s.t.  G0 + sum_i y_i G_i > 0,  lo < y < hi  (hi may be +inf).
struct AffineLmi {
  Matrix G0;
  std::vector<Matrix> G;
  Vector c, lo, hi;

  Matrix eval(const VecRef& y) const;
};

struct BarrierResult {
  Vector y;
  int newton_steps = 0;
  int outer_steps = 0;
};

// Log-barrier path following with damped Newton steps. The constraint is Jacobi
// scaled before every factorization, which keeps badly scaled LMIs tractable.
// Requires a strictly feasible start.
BarrierResult barrier_minimize(const AffineLmi& lmi, Vector y, double rel_gap = 1e-10, int max_outer = 80,
                               const std::function<bool(const Vector&)>& stop = {});

// True when M is positive definite, judged after symmetric Jacobi scaling.
bool jacobi_pd(const MatRef& M);
// Minimum eigenvalue of D M D with D = diag(|M_ii|)^{-1/2}; sign matches that of min eig(M).
double jacobi_min_eig(const MatRef& M);

}  // namespace ebal
