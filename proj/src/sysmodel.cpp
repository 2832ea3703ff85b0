#include "ebal/sysmodel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ebal {

LtiSystem::LtiSystem(Matrix a, Matrix b, Matrix c) : A(std::move(a)), B(std::move(b)), C(std::move(c)) {
  if (A.rows() != A.cols() || B.rows() != A.rows() || C.cols() != A.cols())
    throw Error(ErrorCode::DimensionMismatch, "LtiSystem: A must be square, B n rows, C n cols");
}

namespace {

void check_shapes(const MatRef& J, const MatRef& R, const MatRef& H, const MatRef& B) {
  const auto n = H.rows();
  if (H.cols() != n || J.rows() != n || J.cols() != n || R.rows() != n || R.cols() != n || B.rows() != n)
    throw Error(ErrorCode::DimensionMismatch, "PH matrices are not conformable");
}

}  // namespace

PhValidation validate_ph(const MatRef& J, const MatRef& R, const MatRef& H, const MatRef& B, double tol) {
  check_shapes(J, R, H, B);
  PhValidation out;

  const Matrix Js = skew_part(J);
  const double dev = (Matrix(J) - Js).norm();
  const double jn = spectral_norm(J);
  if (dev > tol * tol::kSkew * jn) out.violations.push_back({ErrorCode::NotSkew, -dev, "J is not skew-symmetric"});

  const Matrix Rs = symmetrize(R);
  const double rn = spectral_norm(R);
  const double rasym = (Matrix(R) - Rs).norm();
  if (rasym > tol * tol::kSkew * rn)
    out.violations.push_back({ErrorCode::DissipationIndefinite, -rasym, "R is not symmetric"});
  const double rmin = R.rows() ? min_eig_sym(Rs) : 0.0;
  if (rmin < -tol * tol::kPsd * rn)
    out.violations.push_back({ErrorCode::DissipationIndefinite, rmin, "R has a negative eigenvalue"});

  const Matrix Hs = symmetrize(H);
  const double hn = spectral_norm(H);
  const double hasym = (Matrix(H) - Hs).norm();
  if (hasym > tol * tol::kSkew * hn)
    out.violations.push_back({ErrorCode::HamiltonianNotPD, -hasym, "H is not symmetric"});
  const double hmin = H.rows() ? min_eig_sym(Hs) : 0.0;
  if (!(hmin > tol * tol::kPd * hn))
    out.violations.push_back({ErrorCode::HamiltonianNotPD, hmin, "H is not positive definite"});

  if (out.violations.empty()) out.system.emplace(PhSystem(PhSystem::Trusted{}, Js, Rs, Hs, Matrix(B), dev));
  return out;
}

PhSystem::PhSystem(const MatRef& J, const MatRef& R, const MatRef& H, const MatRef& B) {
  PhValidation v = validate_ph(J, R, H, B);
  if (!v.ok()) throw Error(v.violations.front().code, v.violations.front().detail, v.violations.front().margin);
  *this = std::move(*v.system);
}

LtiSystem ph_to_lti(const PhSystem& ph) {
  LtiSystem s;
  s.A = ph.F() * ph.H();
  s.B = ph.B();
  s.C = ph.B().transpose() * ph.H();
  return s;
}

StabilityReport stability(const MatRef& A) {
  StabilityReport rep;
  if (A.rows() == 0) {
    rep.spectral_abscissa = -std::numeric_limits<double>::infinity();
    rep.is_stable = true;
    return rep;
  }
  Eigen::EigenSolver<Matrix> es(A, false);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::EigenNonConvergence, "QR iteration budget exceeded");
  rep.spectral_abscissa = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    rep.eigenvalues.push_back(es.eigenvalues()(i));
    rep.spectral_abscissa = std::max(rep.spectral_abscissa, es.eigenvalues()(i).real());
  }
  rep.is_stable = rep.spectral_abscissa < 0;
  return rep;
}

StabilityReport stability(const LtiSystem& sys) { return stability(sys.A); }

PhSystem build_msd_example() {
  const double k[5] = {4, 7, 2, 5, 3};
  const double b[5] = {0, 50, 20, 5, 0};  // b1 absent: first mass is undamped
  const double mass[5] = {1.5, 0.5, 4, 2, 1.25};

  Matrix K = Matrix::Zero(5, 5);
  K(0, 0) = k[0];
  for (int i = 1; i < 5; ++i) {
    K(i, i) = k[i - 1] + k[i];
    K(i - 1, i) = K(i, i - 1) = -k[i - 1];
  }
  Matrix R2 = Matrix::Zero(5, 5);
  for (int i = 1; i < 5; ++i) {
    R2(i, i) += b[i];
    if (i + 1 < 5) {
      R2(i + 1, i + 1) += b[i];
      R2(i, i + 1) = R2(i + 1, i) = -b[i];
    }
  }

  Matrix J = Matrix::Zero(10, 10), R = Matrix::Zero(10, 10), H = Matrix::Zero(10, 10);
  J.topRightCorner(5, 5).setIdentity();
  J.bottomLeftCorner(5, 5) = -Matrix::Identity(5, 5);
  R.bottomRightCorner(5, 5) = R2;
  H.topLeftCorner(5, 5) = K;
  for (int i = 0; i < 5; ++i) H(5 + i, 5 + i) = 1.0 / mass[i];
  Matrix B = Matrix::Zero(10, 1);
  B(5, 0) = 1.0;
  return PhSystem(J, R, H, B);
}

PhSystem build_rlc_example(const RlcParameters& p) {
  const int s = static_cast<int>(p.C.size());
  if (static_cast<int>(p.L.size()) != s || static_cast<int>(p.R_C.size()) != s || static_cast<int>(p.R_L.size()) != s)
    throw Error(ErrorCode::DimensionMismatch, "RLC parameter lists differ in length");
  const int n = 2 * s;

  Matrix J1 = Matrix::Identity(s, s);
  for (int i = 0; i + 1 < s; ++i) J1(i, i + 1) = -1.0;
  Matrix J = Matrix::Zero(n, n), R = Matrix::Zero(n, n), H = Matrix::Zero(n, n);
  J.topRightCorner(s, s) = J1;
  J.bottomLeftCorner(s, s) = -J1.transpose();
  for (int i = 0; i < s; ++i) {
    R(i, i) = 1.0 / p.R_C[i];
    R(s + i, s + i) = p.R_L[i];
    H(i, i) = 1.0 / p.C[i];
    H(s + i, s + i) = 1.0 / p.L[i];
  }
  Matrix B = Matrix::Zero(n, 1);
  B(s, 0) = 1.0;
  return PhSystem(J, R, H, B);
}

}  // namespace ebal
