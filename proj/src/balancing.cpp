#include "ebal/balancing.hpp"

#include <algorithm>
#include <cmath>

namespace ebal {

BalancedRealization balance_pair(const MatRef& Go, const MatRef& Gc) {
  const Eigen::Index n = Go.rows();
  if (Go.cols() != n || Gc.rows() != n || Gc.cols() != n)
    throw Error(ErrorCode::DimensionMismatch, "balance_pair: shapes");
  upper_cholesky(Go, "Go");
  const Matrix phi = upper_cholesky(Gc, "Gc");
  const Matrix L = phi.transpose();

  SymEig eig = sym_eig(L.transpose() * symmetrize(Go) * L);
  const std::vector<int> order = descending_order(eig.values);
  Vector sigma(n);
  Matrix U(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    sigma(j) = std::sqrt(std::max(eig.values(order[j]), 0.0));
    U.col(j) = eig.vectors.col(order[j]);
  }
  if (!(sigma(n - 1) >= 1e-12 * sigma(0)))
    throw Error(ErrorCode::NearSingularSpectrum, "balance_pair: sigma_min below 1e-12 sigma_max", sigma(n - 1));

  BalancedRealization out;
  const Vector rs = sigma.cwiseSqrt();
  out.W = L * U * rs.cwiseInverse().asDiagonal();
  // W^{-1} = Sigma^{1/2} U^T L^{-1}
  const Matrix Linv_t = L.triangularView<Eigen::Lower>().solve(Matrix::Identity(n, n));
  out.Winv = rs.asDiagonal() * U.transpose() * Linv_t;
  out.Lambda = sigma;
  return out;
}

std::pair<double, double> balancing_residuals(const MatRef& W, const MatRef& Winv, const VecRef& Lambda,
                                              const MatRef& Go, const MatRef& Gc) {
  const Matrix D = Lambda.asDiagonal();
  const double w = spectral_norm(W), wi = spectral_norm(Winv);
  const double ro = spectral_norm(W.transpose() * Go * W - D) / (w * w * spectral_norm(Go));
  const double rc = spectral_norm(Winv * Gc * Winv.transpose() - D) / (wi * wi * spectral_norm(Gc));
  return {ro, rc};
}

LtiSystem transform(const LtiSystem& sys, const MatRef& W, const MatRef& Winv) {
  return LtiSystem(Winv * sys.A * W, Winv * sys.B, sys.C * W);
}

LtiSystem transform(const LtiSystem& sys, const MatRef& W) {
  if (W.rows() != sys.n() || W.cols() != sys.n()) throw Error(ErrorCode::DimensionMismatch, "transform: W shape");
  Eigen::FullPivLU<Matrix> lu(W);
  if (!lu.isInvertible() || lu.rcond() < 1e-14) throw Error(ErrorCode::Singular, "transform: W is singular", lu.rcond());
  return LtiSystem(lu.solve(sys.A * W), lu.solve(sys.B), sys.C * W);
}

LtiSystem truncate(const LtiSystem& balanced, int k) {
  if (k < 1 || k >= balanced.n()) throw Error(ErrorCode::BadOrder, "truncate: need 1 <= k < n", k);
  return LtiSystem(balanced.A.topLeftCorner(k, k), balanced.B.topRows(k), balanced.C.leftCols(k));
}

ErrorCertificate error_bound(const VecRef& Lambda, int k) {
  if (k < 0 || k > Lambda.size()) throw Error(ErrorCode::BadOrder, "error_bound: need 0 <= k <= n", k);
  ErrorCertificate c;
  c.k = k;
  for (Eigen::Index j = k; j < Lambda.size(); ++j) c.truncated_sigmas.push_back(Lambda(j));
  double s = 0.0;
  for (double v : c.truncated_sigmas) s += v;
  c.bound = 2.0 * s;
  return c;
}

ErrorCertificate error_bound(const std::vector<double>& Lambda, int k) {
  return error_bound(Eigen::Map<const Vector>(Lambda.data(), static_cast<Eigen::Index>(Lambda.size())), k);
}

ErrorCertificate error_bound(const VecRef& Lambda, const std::vector<int>& truncated) {
  ErrorCertificate c;
  c.k = static_cast<int>(Lambda.size() - truncated.size());
  double s = 0.0;
  for (int i : truncated) {
    if (i < 0 || i >= Lambda.size()) throw Error(ErrorCode::BadOrder, "error_bound: index out of range", i);
    c.truncated_sigmas.push_back(Lambda(i));
    s += Lambda(i);
  }
  c.bound = 2.0 * s;
  return c;
}

std::vector<Gap> truncation_gaps(const VecRef& Lambda) {
  std::vector<Gap> gaps;
  for (Eigen::Index i = 0; i + 1 < Lambda.size(); ++i) {
    const double r = Lambda(i) / Lambda(i + 1);
    gaps.push_back({static_cast<int>(i + 1), r, r >= tol::kNoGap});
  }
  return gaps;
}

}  // namespace ebal
