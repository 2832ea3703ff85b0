#pragma once

#include "ebal/core.hpp"
#include "ebal/extended.hpp"
#include "ebal/gramians.hpp"
#include "ebal/sysmodel.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ebal {

enum class Side { from_P, from_Q, from_T, from_S };
const char* to_string(Side side);

struct CommuteResult {
  bool commutes;
  double residual;
};

// residual = ||H Pb^{-1} Q - Q Pb^{-1} H|| / (||H|| ||Pb^{-1}|| ||Q||).
CommuteResult commute_test(const MatRef& H, const MatRef& Pbreve, const MatRef& Q, double tol = 1e-10);

// Q = delta H, Pbreve = delta H^{-1}, valid when 2 delta R - B B^T >= 0. Throws ConditionFailed.
GramianPair hamiltonian_gramians(const PhSystem& ph, double delta);

struct StructuredFactorization {
  Matrix phi;        // upper, M = phi^T phi
  Matrix U;          // orthogonal
  Vector Lambda_H;   // ascending, positive
  Matrix Fside;
  Matrix Bside;
  Side side;
};

StructuredFactorization factorize(const PhSystem& ph, const MatRef& M, Side side);

struct DiagScaling {
  Vector lambda;           // Lambda, entries sqrt(d)
  Vector d;                // Lambda^2
  double margin = 0.0;     // min eig of the constraint matrix, direct eigendecomposition
  double scaled_margin = 0.0;  // min eig of D (G - required I) D, D Jacobi
  double required = 0.0;
  bool certified = false;
  int newton_steps = 0;
};

// Constraint matrix at d (the side-specific diagonal LMI).
Matrix diag_constraint(const StructuredFactorization& f, const VecRef& d);

// Minimizes sum w_i d_i over the diagonal LMI of the factorization side. Throws Infeasible.
DiagScaling solve_diag_scaling(const StructuredFactorization& f, bool strict, const VecRef& weights);

struct StructuredBalanceResult {
  Side side;
  Matrix W, Winv;
  Vector Lambda;           // Lambda_QP, Lambda_QT or Lambda_SP
  Vector Lambda_balanced;  // Lambda_QP or Lambda_ST
  Matrix partner_gramian;  // Q from P/T sides, Pbreve from Q/S sides
  Matrix Q, Pbreve;        // both generalized Gramians
  Matrix Go, Gc;           // the pair W balances (Q, Pbreve) or (S, T^{-1})
  Vector Hbar_diag;
  std::optional<ObsCertificate> obs;
  std::optional<CtrlCertificate> ctrl;
  DiagScaling scaling;
  double balance_residual = 0.0;
  double hbar_offdiag = 0.0;
};

struct ExtendedOptions {
  // Partner scale (alpha on from_T, beta on from_S); searched from `scale` when unset.
  std::optional<double> partner_scale;
  // Partner Gamma (Gamma_o on from_T, Gamma_c on from_S); zero when unset.
  std::optional<Matrix> partner_gamma;
};

StructuredBalanceResult struct_balance_generalized(const PhSystem& ph, const MatRef& M, Side side,
                                                   const VecRef& weights);

StructuredBalanceResult struct_balance_extended(const PhSystem& ph, const MatRef& M, Side side, const MatRef& Gamma,
                                                double scale, const VecRef& weights,
                                                const ExtendedOptions& opts = {});

// Balances a given (Go, Gc) pair and demands that W^T H W comes out diagonal.
StructuredBalanceResult balance_structured_pair(const PhSystem& ph, const MatRef& Go, const MatRef& Gc);

// Reorders the balanced coordinates: new coordinate j is old coordinate perm[j].
StructuredBalanceResult permute(const StructuredBalanceResult& r, const std::vector<int>& perm);

// Leading-k block of the balanced PH realization. Throws StructureLost, BadOrder.
PhSystem extract_reduced_ph(const PhSystem& ph, const StructuredBalanceResult& r, int k);

struct Pairing {
  int k = 0;
  std::vector<int> permutation;  // retained (first group, then second), then truncated
  std::vector<int> retained, truncated;
  std::vector<int> group;        // 0 or 1 per balanced coordinate
  std::vector<int> home;         // dominant original state per balanced coordinate
};

// Cuts the `pairs_to_cut` smallest entries of each block of a block-diagonal W.
// split is the size of the first state block (n/2 when negative). Throws NotBlockDiagonal.
Pairing rlc_pairing(const StructuredBalanceResult& r, int pairs_to_cut, int split = -1, double tol = 1e-8);

struct LadderParameters {
  std::vector<double> R_C, R_L, C, L;
  std::vector<double> gamma;  // gamma_1 on the input, gamma_{i+1} on the i-th coupling
  PhSystem normalized;
};

// Pairwise state scaling that restores the ladder form J1 = upper bidiagonal with unit diagonal.
LadderParameters ladder_parameters(const PhSystem& reduced);

}  // namespace ebal
