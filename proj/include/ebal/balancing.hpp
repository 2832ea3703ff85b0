#pragma once

#include "ebal/core.hpp"
#include "ebal/sysmodel.hpp"

#include <optional>
#include <vector>

namespace ebal {

struct BalancedRealization {
  Matrix W, Winv;
  Vector Lambda;                   // non-increasing
  std::optional<LtiSystem> system;  // W^{-1} A W, W^{-1} B, C W once transformed
  int k = 0;                        // retained order, 0 until truncated
};

struct ErrorCertificate {
  int k = 0;
  std::vector<double> truncated_sigmas;
  double bound = 0.0;
};

struct Gap {
  int index;     // 1-based i of sigma_i / sigma_{i+1}
  double ratio;
  bool informative;  // ratio >= 1.01
};

// Square-root balancing of an (observability-like, controllability-like) pair.
// Throws NotPD, NearSingularSpectrum.
BalancedRealization balance_pair(const MatRef& Go, const MatRef& Gc);

// Residuals ||W^T Go W - diag L|| / (||W||^2 ||Go||) and ||W^{-1} Gc W^{-T} - diag L|| / (||W^{-1}||^2 ||Gc||).
std::pair<double, double> balancing_residuals(const MatRef& W, const MatRef& Winv, const VecRef& Lambda,
                                              const MatRef& Go, const MatRef& Gc);

LtiSystem transform(const LtiSystem& sys, const MatRef& W);  // throws Singular
LtiSystem transform(const LtiSystem& sys, const MatRef& W, const MatRef& Winv);

LtiSystem truncate(const LtiSystem& balanced, int k);  // throws BadOrder

ErrorCertificate error_bound(const std::vector<double>& Lambda, int k);
ErrorCertificate error_bound(const VecRef& Lambda, int k);
// Bound for an arbitrary set of discarded (0-based) indices.
ErrorCertificate error_bound(const VecRef& Lambda, const std::vector<int>& truncated);

std::vector<Gap> truncation_gaps(const VecRef& Lambda);

}  // namespace ebal
