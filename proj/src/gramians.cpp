#include "ebal/gramians.hpp"

#include <cmath>

namespace ebal {

namespace {

void require_stable(const MatRef& A) {
  if (A.rows() != A.cols()) throw Error(ErrorCode::DimensionMismatch, "Lyapunov: A not square");
  StabilityReport rep = stability(A);
  if (!rep.is_stable) throw Error(ErrorCode::Unstable, "Lyapunov: A is not Hurwitz", rep.spectral_abscissa);
}

// One sweep of the triangular Sylvester recursion T^H Y + Y T + C = 0.
Matrix bartels_stewart(const Eigen::ComplexSchur<Matrix>& schur, const MatRef& W) {
  const CMatrix& T = schur.matrixT();
  const CMatrix& U = schur.matrixU();
  const Eigen::Index n = T.rows();
  CMatrix C = U.adjoint() * W.cast<std::complex<double>>() * U;
  CMatrix Y = CMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      std::complex<double> rhs = -C(i, j);
      for (Eigen::Index k = 0; k < i; ++k) rhs -= std::conj(T(k, i)) * Y(k, j);
      for (Eigen::Index k = 0; k < j; ++k) rhs -= Y(i, k) * T(k, j);
      Y(i, j) = rhs / (std::conj(T(i, i)) + T(j, j));
    }
  }
  return symmetrize((U * Y * U.adjoint()).real());
}

}  // namespace

double lyapunov_residual(const MatRef& A, const MatRef& X, const MatRef& W) {
  const double wn = W.norm();
  const double r = (A.transpose() * X + X * A + W).norm();
  return wn > 0 ? r / wn : r;
}

Matrix solve_lyapunov(const MatRef& A, const MatRef& W) {
  require_stable(A);
  const Eigen::Index n = A.rows();
  if (W.rows() != n || W.cols() != n) throw Error(ErrorCode::DimensionMismatch, "Lyapunov: W shape");
  if (W.norm() == 0.0) return Matrix::Zero(n, n);

  Eigen::ComplexSchur<Matrix> schur(A);
  if (schur.info() != Eigen::Success) throw Error(ErrorCode::EigenNonConvergence, "Schur form");
  Matrix X = bartels_stewart(schur, W);
  // Refinement on the residual.
  for (int it = 0; it < 3 && lyapunov_residual(A, X, W) > 0.1 * tol::kLyapunov; ++it) {
    Matrix Rm = symmetrize(A.transpose() * X + X * A + W);
    X = symmetrize(X + bartels_stewart(schur, Rm));
  }
  const double res = lyapunov_residual(A, X, W);
  if (!(res <= tol::kLyapunov)) throw Error(ErrorCode::IllConditioned, "Lyapunov residual above target", res);
  return X;
}

Matrix solve_lyapunov_kronecker(const MatRef& A, const MatRef& W) {
  require_stable(A);
  const Eigen::Index n = A.rows();
  const Eigen::Index N = n * n;
  Matrix K = Matrix::Zero(N, N);
  const Matrix I = Matrix::Identity(n, n);
  // Column-major vec: vec(A^T X) = (I kron A^T) vec X, vec(X A) = (A^T kron I) vec X.
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) {
      K.block(a * n, b * n, n, n) += I(a, b) * A.transpose();
      K.block(a * n, b * n, n, n) += A(b, a) * I;
    }
  Vector rhs = -Eigen::Map<const Vector>(Matrix(W).data(), N);
  Eigen::PartialPivLU<Matrix> lu(K);
  Vector x = lu.solve(rhs);
  x += lu.solve(rhs - K * x);
  Matrix X = Eigen::Map<Matrix>(x.data(), n, n);
  X = symmetrize(X);
  const double res = lyapunov_residual(A, X, W);
  if (!(res <= tol::kLyapunov)) throw Error(ErrorCode::IllConditioned, "Lyapunov residual above target", res);
  return X;
}

Margin certify_obs(const MatRef& Q, const LtiSystem& sys) {
  const Matrix L = Q * sys.A + sys.A.transpose() * Q;
  const Matrix CC = sys.C.transpose() * sys.C;
  return {min_eig_sym(-(L + CC)), spectral_norm(symmetrize(L)) + spectral_norm(CC)};
}

Margin certify_ctrl(const MatRef& Pbreve, const LtiSystem& sys) {
  const Matrix L = sys.A * Pbreve + Pbreve * sys.A.transpose();
  const Matrix BB = sys.B * sys.B.transpose();
  return {min_eig_sym(-(L + BB)), spectral_norm(symmetrize(L)) + spectral_norm(BB)};
}

GramianPair generalized_gramians(const LtiSystem& sys, const MatRef& slack_o, const MatRef& slack_c) {
  GramianPair g;
  g.slack_o = symmetrize(slack_o);
  g.slack_c = symmetrize(slack_c);
  g.Q = solve_lyapunov(sys.A, sys.C.transpose() * sys.C + g.slack_o);
  g.Pbreve = solve_lyapunov(sys.A.transpose(), sys.B * sys.B.transpose() + g.slack_c);
  g.margin_o = certify_obs(g.Q, sys);
  g.margin_c = certify_ctrl(g.Pbreve, sys);
  return g;
}

Matrix inverse_gramian(const MatRef& Pbreve) {
  Matrix Ps = symmetrize(Pbreve);
  upper_cholesky(Ps, "Pbreve");
  Matrix P = spd_inverse(Ps, "Pbreve");
  Eigen::SelfAdjointEigenSolver<Matrix> es(Ps, Eigen::EigenvaluesOnly);
  const double cond = es.eigenvalues().maxCoeff() / es.eigenvalues().minCoeff();
  const double err = spectral_norm(Ps * P - Matrix::Identity(Ps.rows(), Ps.cols()));
  if (err > 1e-10 * std::max(1.0, cond)) throw Error(ErrorCode::IllConditioned, "inverse Gramian", err);
  return P;
}

}  // namespace ebal
