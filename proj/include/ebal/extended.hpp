#pragma once

#include "ebal/core.hpp"
#include "ebal/sysmodel.hpp"

#include <cmath>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace ebal {

struct ObsCertificate {
  Matrix Q, S, Gamma_o;
  double alpha = 0.0;
  Margin margin;
};

struct CtrlCertificate {
  Matrix P, T, Gamma_c;
  double beta = 0.0;
  Margin margin;
};

// [[X_o, Q - A_o^T S], [Q - S^T A_o, S + S^T]] with A_o = alpha I + A, X_o = -QA - A^T Q - C^T C.
Matrix lmi13_matrix(const MatRef& Q, const MatRef& S, double alpha, const LtiSystem& sys);
// Three-by-three block matrix in (x, z, u) with A_c = beta I + A.
Matrix lmi14_matrix(const MatRef& P, const MatRef& T, double beta, const LtiSystem& sys);

Margin lmi13_margin(const MatRef& Q, const MatRef& S, double alpha, const LtiSystem& sys);
Margin lmi14_margin(const MatRef& P, const MatRef& T, double beta, const LtiSystem& sys);

// S = Q (alpha Q + Gamma_o)^{-1} Q. Throws NotPD, ShiftNotPD.
Matrix make_S(const MatRef& Q, const MatRef& Gamma_o, double alpha);
// T = (beta Pbreve + Gamma_c)^{-1}. Throws NotPD, ShiftNotPD.
Matrix make_T(const MatRef& Pbreve, const MatRef& Gamma_c, double beta);

ObsCertificate build_obs_certificate(const LtiSystem& sys, const MatRef& Q, const MatRef& Gamma_o, double alpha);
CtrlCertificate build_ctrl_certificate(const LtiSystem& sys, const MatRef& Pbreve, const MatRef& Gamma_c,
                                       double beta);

template <class Cert>
struct ScaleResult {
  double scale;
  Cert certificate;
};

namespace detail {
template <class Cert>
std::optional<Cert> try_build(const std::function<Cert(double)>& build,
                              const std::function<Margin(const Cert&)>& certify, double s) {
  try {
    Cert c = build(s);
    if (certify(c).ok()) return c;
  } catch (const Error&) {
  }
  return std::nullopt;
}
}  // namespace detail

// Smallest passing point of {start 2^i}, then 20 bisection steps against the last failure.
// Grid points are evaluated concurrently; the reduction picks the lowest passing index.
template <class Cert>
ScaleResult<Cert> find_scale(const std::function<Cert(double)>& build,
                             const std::function<Margin(const Cert&)>& certify, double start,
                             int max_doublings = 60) {
  if (!(start > 0)) throw Error(ErrorCode::Usage, "find_scale: start must be positive");
  const int npts = max_doublings + 1;
  std::vector<char> pass(npts, 0);
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < npts; ++i) pass[i] = detail::try_build(build, certify, std::ldexp(start, i)).has_value();

  int first = -1;
  for (int i = 0; i < npts && first < 0; ++i)
    if (pass[i]) first = i;
  if (first < 0) throw Error(ErrorCode::NoFeasibleScale, "no certified scale in the doubling grid");

  double hi = std::ldexp(start, first);
  std::optional<Cert> best = detail::try_build(build, certify, hi);
  if (first == 0) return {hi, *best};
  double lo = std::ldexp(start, first - 1);
  for (int it = 0; it < 20; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (auto c = detail::try_build(build, certify, mid)) {
      hi = mid;
      best = std::move(c);
    } else {
      lo = mid;
    }
  }
  return {hi, *best};
}

}  // namespace ebal
