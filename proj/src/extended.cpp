#include "ebal/extended.hpp"

namespace ebal {

Matrix lmi13_matrix(const MatRef& Q, const MatRef& S, double alpha, const LtiSystem& sys) {
  const Eigen::Index n = sys.n();
  const Matrix& A = sys.A;
  const Matrix Ao = alpha * Matrix::Identity(n, n) + A;
  const Matrix Xo = -Q * A - A.transpose() * Q - sys.C.transpose() * sys.C;
  Matrix M(2 * n, 2 * n);
  M.topLeftCorner(n, n) = Xo;
  M.topRightCorner(n, n) = Q - Ao.transpose() * S;
  M.bottomLeftCorner(n, n) = Q - S.transpose() * Ao;
  M.bottomRightCorner(n, n) = S + S.transpose();
  return M;
}

Matrix lmi14_matrix(const MatRef& P, const MatRef& T, double beta, const LtiSystem& sys) {
  const Eigen::Index n = sys.n(), m = sys.m();
  const Matrix& A = sys.A;
  const Matrix& B = sys.B;
  const Matrix Ac = beta * Matrix::Identity(n, n) + A;
  Matrix M(2 * n + m, 2 * n + m);
  M.block(0, 0, n, n) = -P * A - A.transpose() * P;
  M.block(0, n, n, n) = -P + Ac.transpose() * T;
  M.block(0, 2 * n, n, m) = -2.0 * P * B;
  M.block(n, 0, n, n) = -P + T.transpose() * Ac;
  M.block(n, n, n, n) = T + T.transpose();
  M.block(n, 2 * n, n, m) = 2.0 * T.transpose() * B;
  M.block(2 * n, 0, m, n) = -2.0 * B.transpose() * P;
  M.block(2 * n, n, m, n) = 2.0 * B.transpose() * T;
  M.block(2 * n, 2 * n, m, m) = 4.0 * Matrix::Identity(m, m);
  return M;
}

Margin lmi13_margin(const MatRef& Q, const MatRef& S, double alpha, const LtiSystem& sys) {
  return sym_margin(lmi13_matrix(Q, S, alpha, sys));
}

Margin lmi14_margin(const MatRef& P, const MatRef& T, double beta, const LtiSystem& sys) {
  return sym_margin(lmi14_matrix(P, T, beta, sys));
}

namespace {

void require_shift_pd(const Matrix& M, const char* what) {
  const double mn = min_eig_sym(M);
  if (!(mn > tol::kPd * spectral_norm(M))) throw Error(ErrorCode::ShiftNotPD, what, mn);
}

}  // namespace

Matrix make_S(const MatRef& Q, const MatRef& Gamma_o, double alpha) {
  const Matrix Qs = symmetrize(Q);
  upper_cholesky(Qs, "Q");
  const Matrix M = symmetrize(alpha * Qs + symmetrize(Gamma_o));
  require_shift_pd(M, "alpha Q + Gamma_o is not positive definite");
  if (Gamma_o.isZero(0.0)) return Qs / alpha;
  Eigen::LLT<Matrix> llt(M);
  return symmetrize(Qs * llt.solve(Qs));
}

Matrix make_T(const MatRef& Pbreve, const MatRef& Gamma_c, double beta) {
  const Matrix Ps = symmetrize(Pbreve);
  upper_cholesky(Ps, "Pbreve");
  const Matrix M = symmetrize(beta * Ps + symmetrize(Gamma_c));
  require_shift_pd(M, "beta Pbreve + Gamma_c is not positive definite");
  return spd_inverse(M, "beta Pbreve + Gamma_c");
}

ObsCertificate build_obs_certificate(const LtiSystem& sys, const MatRef& Q, const MatRef& Gamma_o, double alpha) {
  ObsCertificate c;
  c.Q = symmetrize(Q);
  c.Gamma_o = Gamma_o;
  c.alpha = alpha;
  c.S = make_S(c.Q, Gamma_o, alpha);
  c.margin = lmi13_margin(c.Q, c.S, alpha, sys);
  return c;
}

CtrlCertificate build_ctrl_certificate(const LtiSystem& sys, const MatRef& Pbreve, const MatRef& Gamma_c,
                                       double beta) {
  CtrlCertificate c;
  c.P = spd_inverse(Pbreve, "Pbreve");
  c.Gamma_c = Gamma_c;
  c.beta = beta;
  c.T = make_T(Pbreve, Gamma_c, beta);
  c.margin = lmi14_margin(c.P, c.T, beta, sys);
  return c;
}

}  // namespace ebal
