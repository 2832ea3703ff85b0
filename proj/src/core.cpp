#include "ebal/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ebal {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotSkew: return "NotSkew";
    case ErrorCode::DissipationIndefinite: return "DissipationIndefinite";
    case ErrorCode::HamiltonianNotPD: return "HamiltonianNotPD";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EigenNonConvergence: return "EigenNonConvergence";
    case ErrorCode::Unstable: return "Unstable";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::NotPD: return "NotPD";
    case ErrorCode::ShiftNotPD: return "ShiftNotPD";
    case ErrorCode::NoFeasibleScale: return "NoFeasibleScale";
    case ErrorCode::NearSingularSpectrum: return "NearSingularSpectrum";
    case ErrorCode::Singular: return "Singular";
    case ErrorCode::BadOrder: return "BadOrder";
    case ErrorCode::ConditionFailed: return "ConditionFailed";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::StructureLost: return "StructureLost";
    case ErrorCode::NotBlockDiagonal: return "NotBlockDiagonal";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::CertificateMismatch: return "CertificateMismatch";
    case ErrorCode::ZeroInput: return "ZeroInput";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Usage: return "Usage";
  }
  return "Unknown";
}

Matrix symmetrize(const MatRef& M) { return 0.5 * (M + M.transpose()); }

Matrix skew_part(const MatRef& M) { return 0.5 * (M - M.transpose()); }

double spectral_norm(const MatRef& M) {
  if (M.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(M);
  return svd.singularValues()(0);
}

double min_eig_sym(const MatRef& M) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(M), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::EigenNonConvergence, "symmetric eigensolver");
  return es.eigenvalues()(0);
}

Margin sym_margin(const MatRef& M) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(M), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::EigenNonConvergence, "symmetric eigensolver");
  const Vector& ev = es.eigenvalues();
  return {ev(0), std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)))};
}

void fix_column_signs(Matrix& V) {
  for (Eigen::Index j = 0; j < V.cols(); ++j) {
    Eigen::Index imax = 0;
    V.col(j).cwiseAbs().maxCoeff(&imax);
    if (V(imax, j) < 0) V.col(j) *= -1.0;
  }
}

SymEig sym_eig(const MatRef& M) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(M));
  if (es.info() != Eigen::Success) throw Error(ErrorCode::EigenNonConvergence, "symmetric eigensolver");
  SymEig out{es.eigenvalues(), es.eigenvectors()};
  fix_column_signs(out.vectors);
  return out;
}

Matrix upper_cholesky(const MatRef& M, const char* what) {
  Matrix S = symmetrize(M);
  Eigen::LLT<Matrix> llt(S);
  if (llt.info() != Eigen::Success || min_eig_sym(S) <= tol::kPd * spectral_norm(S))
    throw Error(ErrorCode::NotPD, std::string(what) + " is not positive definite");
  return llt.matrixU();
}

Matrix spd_inverse(const MatRef& M, const char* what) {
  Matrix S = symmetrize(M);
  Eigen::LLT<Matrix> llt(S);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorCode::NotPD, std::string(what) + " is not positive definite");
  return symmetrize(llt.solve(Matrix::Identity(S.rows(), S.cols())));
}

std::vector<int> descending_order(const VecRef& v) {
  std::vector<int> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return v(a) > v(b); });
  return idx;
}

}  // namespace ebal
