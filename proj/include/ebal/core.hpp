#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace ebal {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using MatRef = Eigen::Ref<const Eigen::MatrixXd>;
using VecRef = Eigen::Ref<const Eigen::VectorXd>;

enum class ErrorCode {
  NotSkew,
  DissipationIndefinite,
  HamiltonianNotPD,
  DimensionMismatch,
  EigenNonConvergence,
  Unstable,
  IllConditioned,
  NotPD,
  ShiftNotPD,
  NoFeasibleScale,
  NearSingularSpectrum,
  Singular,
  BadOrder,
  ConditionFailed,
  Infeasible,
  StructureLost,
  NotBlockDiagonal,
  StepTooLarge,
  CertificateMismatch,
  ZeroInput,
  ParseError,
  Io,
  Usage,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what, double value = 0.0)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), value_(value) {}

  ErrorCode code() const { return code_; }
  // Numeric context: best margin, offending residual, line number, ...
  double value() const { return value_; }

 private:
  ErrorCode code_;
  double value_;
};

namespace tol {
inline constexpr double kPsd = 1e-9;        // relative, semidefinite checks
inline constexpr double kPd = 1e-12;        // relative, strict definiteness
inline constexpr double kSkew = 1e-8;       // skew deviation accepted in J
inline constexpr double kLyapunov = 1e-10;  // relative Lyapunov residual
inline constexpr double kBalance = 1e-8;    // balancing identities
inline constexpr double kDiag = 1e-8;       // off-diagonal part of W^T H W
inline constexpr double kStrict = 1e-8;     // strict LMI margin, times ||B B^T||
inline constexpr double kNoGap = 1.01;      // ratio below which there is no gap
}  // namespace tol

// Signed margin of a symmetric test matrix together with the scale it is judged against.
struct Margin {
  double value = 0.0;
  double scale = 0.0;

  bool ok(double rel_tol = tol::kPsd) const { return value >= -rel_tol * scale; }
};

Matrix symmetrize(const MatRef& M);
Matrix skew_part(const MatRef& M);
double spectral_norm(const MatRef& M);
double min_eig_sym(const MatRef& M);
// Minimum eigenvalue of the symmetric part, scaled by the largest |eigenvalue|.
Margin sym_margin(const MatRef& M);

// Ascending eigenvalues, eigenvector columns with the largest-magnitude entry positive.
struct SymEig {
  Vector values;
  Matrix vectors;
};
SymEig sym_eig(const MatRef& M);

void fix_column_signs(Matrix& V);

// Upper factor phi with M = phi^T phi. Throws NotPD.
Matrix upper_cholesky(const MatRef& M, const char* what);
// Inverse of an SPD matrix, symmetrized. Throws NotPD.
Matrix spd_inverse(const MatRef& M, const char* what);

// Indices that sort v in non-increasing order, ties keep original order.
std::vector<int> descending_order(const VecRef& v);

}  // namespace ebal
