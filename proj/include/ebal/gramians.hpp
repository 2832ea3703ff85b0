#pragma once

#include "ebal/core.hpp"
#include "ebal/sysmodel.hpp"

namespace ebal {

struct GramianPair {
  Matrix Q;
  Matrix Pbreve;
  Matrix slack_o;
  Matrix slack_c;
  Margin margin_o;
  Margin margin_c;
};

// Solves A^T X + X A + W = 0 (Bartels-Stewart on the complex Schur form).
// Throws Unstable, IllConditioned.
Matrix solve_lyapunov(const MatRef& A, const MatRef& W);

// Reference solver: dense n^2 x n^2 system (I kron A^T + A^T kron I) vec X = -vec W.
Matrix solve_lyapunov_kronecker(const MatRef& A, const MatRef& W);

double lyapunov_residual(const MatRef& A, const MatRef& X, const MatRef& W);

GramianPair generalized_gramians(const LtiSystem& sys, const MatRef& slack_o, const MatRef& slack_c);

// min eig of -(Q A + A^T Q + C^T C); scale = ||Q A + A^T Q|| + ||C^T C||.
Margin certify_obs(const MatRef& Q, const LtiSystem& sys);
// min eig of -(A P + P A^T + B B^T).
Margin certify_ctrl(const MatRef& Pbreve, const LtiSystem& sys);

// P = Pbreve^{-1}. Throws NotPD.
Matrix inverse_gramian(const MatRef& Pbreve);

}  // namespace ebal
