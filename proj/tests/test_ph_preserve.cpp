#include "ebal/balancing.hpp"
#include "ebal/ph_preserve.hpp"
#include "ebal/reference_data.hpp"

#include "fixtures.hpp"

#include <doctest.h>

#include <cmath>

using namespace ebal;
using test::mat;

namespace {

PhSystem scalar_ph() { return PhSystem(mat(1, 1, {0}), mat(1, 1, {1}), mat(1, 1, {1}), mat(1, 1, {1})); }

// J = 0 and diagonal R, H: every construction stays diagonal
PhSystem diagonal_ph() {
  return PhSystem(Matrix::Zero(2, 2), mat(2, 2, {1, 0, 0, 2}), mat(2, 2, {1, 0, 0, 3}), mat(2, 1, {1, 1}));
}

double offdiag(const Matrix& M) { return (M - Matrix(M.diagonal().asDiagonal())).norm() / M.norm(); }

}  // namespace

TEST_CASE("commutation test") {
  const Matrix D1 = mat(2, 2, {1, 0, 0, 2}), D2 = mat(2, 2, {3, 0, 0, 5}), D3 = mat(2, 2, {7, 0, 0, 11});
  const CommuteResult a = commute_test(D1, D2, D3);
  CHECK(a.commutes);
  CHECK(a.residual == 0.0);

  // Pb^{-1} Q = (1/3)[[2,-2],[-1,4]] while Q Pb^{-1} = (1/3)[[2,-1],[-2,4]]
  const CommuteResult b = commute_test(Matrix::Identity(2, 2), mat(2, 2, {2, 1, 1, 2}), mat(2, 2, {1, 0, 0, 2}));
  CHECK_FALSE(b.commutes);
  CHECK(b.residual > 0.1);

  const PhSystem rlc = build_rlc_example();
  const Matrix T = reference::rlc_t_printed().asDiagonal();
  const Matrix S = reference::rlc_s_printed().asDiagonal();
  CHECK(commute_test(rlc.H(), T, S).commutes);
}

TEST_CASE("Hamiltonian Gramians") {
  const PhSystem toy(mat(2, 2, {0, 1, -1, 0}), Matrix::Identity(2, 2), Matrix::Identity(2, 2), mat(2, 1, {0, 1}));
  const GramianPair g = hamiltonian_gramians(toy, 1.0);
  CHECK(g.Q.isApprox(Matrix::Identity(2, 2)));
  CHECK(g.Pbreve.isApprox(Matrix::Identity(2, 2)));
  CHECK(g.margin_o.ok());
  CHECK(g.margin_c.ok());
  // -(QA + A^T Q + C^T C) = 2R - B B^T = diag(2, 1)
  CHECK(g.margin_o.value == doctest::Approx(1));

  for (double delta : {0.01, 1.0, 100.0}) {
    try {
      hamiltonian_gramians(build_msd_example(), delta);
      FAIL("expected ConditionFailed");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ConditionFailed);
    }
  }
  const GramianPair r = hamiltonian_gramians(build_rlc_example(), 0.11);
  CHECK(r.margin_o.ok());
  CHECK(r.margin_c.ok());
}

TEST_CASE("factorization") {
  const PhSystem toy(mat(2, 2, {0, 1, -1, 0}), Matrix::Identity(2, 2), Matrix::Identity(2, 2), mat(2, 1, {0, 1}));
  const StructuredFactorization f = factorize(toy, Matrix::Identity(2, 2), Side::from_P);
  CHECK(f.phi.isApprox(Matrix::Identity(2, 2)));
  CHECK(f.Lambda_H.isApprox(Vector::Ones(2)));
  CHECK(test::rel_diff(f.U.transpose() * f.U, Matrix::Identity(2, 2)) < 1e-15);
  CHECK(test::rel_diff(f.Fside, f.U.transpose() * toy.F() * f.U) < 1e-15);
  CHECK(test::rel_diff(f.Bside, f.U.transpose() * toy.B()) < 1e-15);

  const PhSystem s9(mat(1, 1, {0}), mat(1, 1, {1}), mat(1, 1, {9}), mat(1, 1, {1}));
  const StructuredFactorization g = factorize(s9, mat(1, 1, {4}), Side::from_P);
  CHECK(g.phi(0, 0) == doctest::Approx(2));
  CHECK(g.Lambda_H(0) == doctest::Approx(36));
  CHECK(std::abs(g.U(0, 0)) == doctest::Approx(1));

  // M = phi^T phi, and U diagonalizes the congruence of H on either side
  const PhSystem msd = build_msd_example();
  const Matrix eps = 1e-5 * Matrix::Identity(10, 10);
  const Matrix Pb = generalized_gramians(ph_to_lti(msd), eps, eps).Pbreve;
  // rounding to two decimals leaves the printed matrix indefinite
  CHECK(min_eig_sym(reference::msd_pbreve_printed()) < 0);
  for (Side side : {Side::from_P, Side::from_Q}) {
    const StructuredFactorization h = factorize(msd, Pb, side);
    CHECK(test::rel_diff(h.phi.transpose() * h.phi, Pb) < 1e-14);
    for (Eigen::Index i = 1; i < h.Lambda_H.size(); ++i) CHECK(h.Lambda_H(i - 1) <= h.Lambda_H(i));
  }
  CHECK_THROWS_AS(factorize(msd, mat(2, 2, {1, 0, 0, 1}), Side::from_P), Error);
}

TEST_CASE("diagonal scaling: scalar closed-form threshold") {
  const StructuredFactorization f = factorize(scalar_ph(), mat(1, 1, {1}), Side::from_P);
  // constraint 2d - 1 >= 0
  const DiagScaling d = solve_diag_scaling(f, false, Vector::Ones(1));
  CHECK(d.d(0) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(d.lambda(0) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-6));
  CHECK(d.certified);
  CHECK(d.margin >= 0);

  const DiagScaling s = solve_diag_scaling(f, true, Vector::Ones(1));
  CHECK(s.required == doctest::Approx(tol::kStrict));
  CHECK(s.d(0) >= 0.5 + 0.5 * tol::kStrict);
  CHECK(diag_constraint(f, s.d)(0, 0) >= s.required * (1 - 1e-6));
}

TEST_CASE("diagonal scaling: infeasible sign pattern") {
  StructuredFactorization f;
  f.side = Side::from_P;
  f.phi = Matrix::Identity(2, 2);
  f.U = Matrix::Identity(2, 2);
  f.Lambda_H = Vector::Ones(2);
  f.Fside = mat(2, 2, {1, 0, 0, 2});
  f.Bside = mat(2, 1, {1, 1});
  try {
    solve_diag_scaling(f, false, Vector::Ones(2));
    FAIL("expected Infeasible");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Infeasible);
  }
  CHECK_THROWS_AS(solve_diag_scaling(f, false, Vector::Ones(3)), Error);
}

TEST_CASE("diagonal scaling re-certifies on random feasible instances") {
  std::mt19937 rng(51);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 3;
    Matrix X(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) X(i, j) = g(rng);
    const Matrix J = X - X.transpose();
    const Matrix R = X * X.transpose() + 0.1 * Matrix::Identity(n, n);
    const Matrix H = X.transpose() * X + Matrix::Identity(n, n);
    const PhSystem ph(J, R, H, mat(3, 1, {g(rng), g(rng), g(rng)}));
    for (Side side : {Side::from_P, Side::from_Q}) {
      const StructuredFactorization f = factorize(ph, H, side);
      const DiagScaling d = solve_diag_scaling(f, true, Vector::Ones(n));
      CHECK(d.certified);
      CHECK(min_eig_sym(diag_constraint(f, d.d)) >= -1e-9 * diag_constraint(f, d.d).norm());
    }
  }
}

TEST_CASE("generalized structured balancing of small systems") {
  const PhSystem s = scalar_ph();
  const StructuredBalanceResult r = struct_balance_generalized(s, mat(1, 1, {0.5}), Side::from_P, Vector::Ones(1));
  CHECK(r.W.size() == 1);
  // W balances (Q, Pbreve), so Lambda^2 = Q Pbreve
  CHECK(r.Lambda_balanced(0) == doctest::Approx(std::sqrt(r.Q(0, 0) * 0.5)).epsilon(1e-10));
  CHECK(r.Pbreve(0, 0) == doctest::Approx(0.5));
  CHECK(certify_obs(r.Q, ph_to_lti(s)).ok());

  const PhSystem d = diagonal_ph();
  const Matrix Pb = hamiltonian_gramians(d, 1.0).Pbreve;
  const StructuredBalanceResult rd = struct_balance_generalized(d, Pb, Side::from_P, Vector::Ones(2));
  CHECK(offdiag(rd.W.cwiseAbs()) < 1e-12);
  CHECK(offdiag(rd.W.transpose() * d.H() * rd.W) < 1e-12);
  CHECK(rd.balance_residual < tol::kBalance);
}

TEST_CASE("reduced PH model equals the truncated balanced model") {
  const PhSystem toy = test::ph_toy();
  const LtiSystem s = ph_to_lti(toy);
  const GramianPair g = generalized_gramians(s, 1e-5 * Matrix::Identity(2, 2), 1e-5 * Matrix::Identity(2, 2));
  for (Side side : {Side::from_P, Side::from_Q}) {
    const MatRef M = side == Side::from_P ? MatRef(g.Pbreve) : MatRef(g.Q);
    const StructuredBalanceResult r = struct_balance_generalized(toy, M, side, Vector::Ones(2));
    CHECK(r.hbar_offdiag < tol::kDiag);
    const PhSystem red = extract_reduced_ph(toy, r, 1);
    const LtiSystem a = ph_to_lti(red);
    const LtiSystem b = truncate(transform(s, r.W, r.Winv), 1);
    CHECK(test::rel_diff(a.A, b.A) < 1e-12);
    CHECK(test::rel_diff(a.B, b.B) < 1e-12);
    CHECK(test::rel_diff(a.C, b.C) < 1e-12);
    CHECK(red.R()(0, 0) >= 0);
  }
}

TEST_CASE("mechanical generalized structured balancing keeps the PH form") {
  const PhSystem msd = build_msd_example();
  const LtiSystem s = ph_to_lti(msd);
  const GramianPair g = generalized_gramians(s, 1e-5 * Matrix::Identity(10, 10), 1e-5 * Matrix::Identity(10, 10));
  const StructuredBalanceResult r = struct_balance_generalized(msd, g.Pbreve, Side::from_P, Vector::Ones(10));
  CHECK(r.Lambda_balanced.size() == 10);
  // the printed bound is 2.06; the diagonal LMI is solved with a different objective
  CHECK(error_bound(r.Lambda_balanced, 6).bound <= 2.06 * 1.1);
  const PhSystem red = extract_reduced_ph(msd, r, 6);
  CHECK(red.n() == 6);
  CHECK(validate_ph(red.J(), red.R(), red.H(), red.B()).ok());
  CHECK_THROWS_AS(extract_reduced_ph(msd, r, 10), Error);
}

TEST_CASE("RLC pairing") {
  const PhSystem rlc = build_rlc_example();
  const Matrix Pb = reference::rlc_delta_c * rlc.H().inverse();
  const StructuredBalanceResult r =
      struct_balance_extended(rlc, Pb, Side::from_T, reference::rlc_gamma_c(), reference::rlc_beta, Vector::Ones(10));
  const Pairing p = rlc_pairing(r, 2);
  CHECK(p.k == 6);
  CHECK(p.truncated.size() == 4);
  // the cut coordinates are the two smallest of each block
  int cut0 = 0;
  for (int j : p.truncated) cut0 += p.group[j] == 0;
  CHECK(cut0 == 2);
  const Pairing id = rlc_pairing(r, 0);
  CHECK(id.k == 10);
  for (int j = 0; j < 10; ++j) CHECK(id.permutation[j] == j);

  StructuredBalanceResult mixed = r;
  mixed.W(7, 0) = 1e-3 * mixed.W.col(0).norm();
  try {
    rlc_pairing(mixed, 2);
    FAIL("expected NotBlockDiagonal");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotBlockDiagonal);
  }
}
