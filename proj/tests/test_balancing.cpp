#include "ebal/analysis.hpp"
#include "ebal/balancing.hpp"
#include "ebal/gramians.hpp"
#include "ebal/reference_data.hpp"

#include "fixtures.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace ebal;
using test::mat;

namespace {

void check_balanced(const BalancedRealization& b, const Matrix& Go, const Matrix& Gc, double tol) {
  const Matrix L = b.Lambda.asDiagonal();
  CHECK(test::rel_diff(b.W.transpose() * Go * b.W, L) < tol);
  CHECK(test::rel_diff(b.Winv * Gc * b.Winv.transpose(), L) < tol);
  CHECK((b.W * b.Winv - Matrix::Identity(b.W.rows(), b.W.rows())).norm() < tol * b.W.norm() * b.Winv.norm());
  for (Eigen::Index i = 1; i < b.Lambda.size(); ++i) CHECK(b.Lambda(i - 1) >= b.Lambda(i));
}

}  // namespace

TEST_CASE("balancing an already balanced pair") {
  const Matrix G = mat(2, 2, {2, 0, 0, 0.5});
  const BalancedRealization b = balance_pair(G, G);
  CHECK(b.Lambda(0) == doctest::Approx(2));
  CHECK(b.Lambda(1) == doctest::Approx(0.5));
  CHECK(test::rel_diff(b.W.cwiseAbs(), Matrix::Identity(2, 2)) < 1e-14);
}

TEST_CASE("scalar balancing") {
  const BalancedRealization b = balance_pair(mat(1, 1, {4}), mat(1, 1, {1}));
  CHECK(b.Lambda(0) == doctest::Approx(2));
  CHECK(std::abs(b.W(0, 0)) == doctest::Approx(1 / std::sqrt(2.0)));

  const GramianPair g = generalized_gramians(test::scalar_system(), Matrix::Zero(1, 1), Matrix::Zero(1, 1));
  CHECK(balance_pair(g.Q, g.Pbreve).Lambda(0) == doctest::Approx(0.5));
}

TEST_CASE("Lambda are the square roots of the eigenvalues of Gc Go") {
  std::mt19937 rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 2 + trial % 6;
    const LtiSystem s = test::random_stable(rng, n, 2, 2);
    const Matrix eps = 1e-2 * Matrix::Identity(n, n);
    const GramianPair g = generalized_gramians(s, eps, eps);
    const BalancedRealization b = balance_pair(g.Q, g.Pbreve);
    check_balanced(b, g.Q, g.Pbreve, 1e-9);
    Eigen::EigenSolver<Matrix> es(g.Pbreve * g.Q);
    std::vector<double> ev;
    for (int i = 0; i < n; ++i) ev.push_back(std::sqrt(es.eigenvalues()(i).real()));
    std::sort(ev.rbegin(), ev.rend());
    for (int i = 0; i < n; ++i) CHECK(b.Lambda(i) == doctest::Approx(ev[i]).epsilon(1e-8));
    const auto [ro, rc] = balancing_residuals(b.W, b.Winv, b.Lambda, g.Q, g.Pbreve);
    CHECK(ro < tol::kBalance);
    CHECK(rc < tol::kBalance);
  }
}

TEST_CASE("numerically singular Gramians are rejected") {
  try {
    balance_pair(mat(2, 2, {1, 0, 0, 1e-30}), Matrix::Identity(2, 2));
    FAIL("expected NotPD");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotPD);
  }
  CHECK_THROWS_AS(balance_pair(mat(1, 1, {-1}), mat(1, 1, {1})), Error);
}

TEST_CASE("transform") {
  const LtiSystem s = test::diag2_system();
  const LtiSystem same = transform(s, Matrix::Identity(2, 2));
  CHECK(same.A == s.A);
  CHECK(same.B == s.B);
  CHECK(same.C == s.C);
  const LtiSystem scaled = transform(s, mat(2, 2, {2, 0, 0, 1}));
  CHECK(scaled.A.isApprox(s.A));
  CHECK(scaled.B.isApprox(mat(2, 1, {0.5, 1})));
  CHECK(scaled.C.isApprox(mat(1, 2, {2, 1})));
  CHECK_THROWS_AS(transform(s, mat(2, 2, {1, 1, 1, 1})), Error);
}

TEST_CASE("mechanical output map after transformation") {
  const PhSystem ph = build_msd_example();
  const LtiSystem s = ph_to_lti(ph);
  const GramianPair g = generalized_gramians(s, 1e-5 * Matrix::Identity(10, 10), 1e-5 * Matrix::Identity(10, 10));
  const BalancedRealization b = balance_pair(g.Q, g.Pbreve);
  const LtiSystem t = transform(s, b.W, b.Winv);
  CHECK(test::rel_diff(t.C, ph.B().transpose() * ph.H() * b.W) < 1e-12);
}

TEST_CASE("similarity preserves the transfer function and truncation keeps the leading block") {
  std::mt19937 rng(41);
  const LtiSystem s = test::random_stable(rng, 6, 1, 1);
  const GramianPair g = generalized_gramians(s, 1e-3 * Matrix::Identity(6, 6), 1e-3 * Matrix::Identity(6, 6));
  const BalancedRealization b = balance_pair(g.Q, g.Pbreve);
  const LtiSystem t = transform(s, b.W, b.Winv);
  for (double w : {0.0, 0.3, 1.0, 7.0}) CHECK(sigma_max_at(t, w) == doctest::Approx(sigma_max_at(s, w)).epsilon(1e-9));

  const LtiSystem r = truncate(t, 3);
  CHECK(r.n() == 3);
  CHECK(r.A == t.A.topLeftCorner(3, 3));
  CHECK(r.B == t.B.topRows(3));
  CHECK(r.C == t.C.leftCols(3));
  CHECK_THROWS_AS(truncate(t, 0), Error);
  CHECK_THROWS_AS(truncate(t, 6), Error);
}

TEST_CASE("truncating a 2x2 diagonal balanced system") {
  const LtiSystem s(mat(2, 2, {-1, 0, 0, -2}), mat(2, 1, {1, 0.5}), mat(1, 2, {1, 0.5}));
  const LtiSystem r = truncate(s, 1);
  CHECK(r.A(0, 0) == -1);
  CHECK(r.B(0, 0) == 1);
  CHECK(r.C(0, 0) == 1);
}

TEST_CASE("error bounds from the printed singular values") {
  CHECK(error_bound(reference::msd_lambda_qp(), 6).bound == doctest::Approx(2.062).epsilon(1e-12));
  CHECK(error_bound(reference::msd_lambda_st(), 6).bound == doctest::Approx(1.572).epsilon(1e-12));
  CHECK(error_bound(reference::msd_lambda_qp(), 10).bound == 0.0);
  const ErrorCertificate c = error_bound(reference::msd_lambda_st(), 9);
  REQUIRE(c.truncated_sigmas.size() == 1);
  CHECK(c.bound == doctest::Approx(2 * 0.041));
  CHECK_THROWS_AS(error_bound(reference::msd_lambda_qp(), 11), Error);

  Vector L(4);
  L << 4, 3, 2, 1;
  CHECK(error_bound(L, std::vector<int>{0, 3}).bound == doctest::Approx(10));
}

TEST_CASE("gap ratios") {
  Vector L(3);
  L << 4, 2, 0.1;
  const auto g = truncation_gaps(L);
  REQUIRE(g.size() == 2);
  CHECK(g[0].index == 1);
  CHECK(g[0].ratio == doctest::Approx(2));
  CHECK(g[1].ratio == doctest::Approx(20));
  CHECK(g[1].informative);

  const auto flat = truncation_gaps(Vector::Constant(5, 0.3));
  for (const Gap& x : flat) {
    CHECK(x.ratio == doctest::Approx(1));
    CHECK_FALSE(x.informative);
  }

  const std::vector<double> lqp = reference::msd_lambda_qp();
  const auto m = truncation_gaps(Eigen::Map<const Vector>(lqp.data(), 10));
  const auto best = std::max_element(m.begin(), m.end(), [](const Gap& a, const Gap& b) { return a.ratio < b.ratio; });
  CHECK(best->index == 9);
  CHECK(best->ratio == doctest::Approx(0.155 / 0.070));
  CHECK(m[3].ratio == doctest::Approx(2.564 / 1.188));
}

TEST_CASE("truncation with the generalized bound dominates the H-infinity error") {
  std::mt19937 rng(43);
  for (int trial = 0; trial < 6; ++trial) {
    const LtiSystem s = test::random_stable(rng, 5, 1, 1);
    const GramianPair g = generalized_gramians(s, 1e-2 * Matrix::Identity(5, 5), 1e-2 * Matrix::Identity(5, 5));
    const BalancedRealization b = balance_pair(g.Q, g.Pbreve);
    const LtiSystem t = transform(s, b.W, b.Winv);
    for (int k = 1; k < 5; ++k) {
      const double err = hinf_norm(error_system(s, truncate(t, k)));
      CHECK(err <= error_bound(b.Lambda, k).bound * (1 + 1e-6));
    }
  }
}
