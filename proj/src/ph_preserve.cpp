#include "ebal/ph_preserve.hpp"

#include "ebal/balancing.hpp"
#include "ebal/diag_lmi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ebal {

const char* to_string(Side side) {
  switch (side) {
    case Side::from_P: return "from_P";
    case Side::from_Q: return "from_Q";
    case Side::from_T: return "from_T";
    case Side::from_S: return "from_S";
  }
  return "?";
}

CommuteResult commute_test(const MatRef& H, const MatRef& Pbreve, const MatRef& Q, double tol) {
  upper_cholesky(Pbreve, "Pbreve");
  const Matrix Pinv = spd_inverse(Pbreve, "Pbreve");
  const double denom = spectral_norm(H) * spectral_norm(Pinv) * spectral_norm(Q);
  if (denom == 0.0) return {true, 0.0};
  const double r = spectral_norm(H * Pinv * Q - Q * Pinv * H) / denom;
  return {r <= tol, r};
}

GramianPair hamiltonian_gramians(const PhSystem& ph, double delta) {
  if (!(delta > 0)) throw Error(ErrorCode::ConditionFailed, "delta must be positive", delta);
  const Matrix BB = ph.B() * ph.B().transpose();
  const Matrix cond = 2.0 * delta * ph.R() - BB;
  const Margin m{min_eig_sym(cond), spectral_norm(2.0 * delta * ph.R()) + spectral_norm(BB)};
  if (!m.ok()) throw Error(ErrorCode::ConditionFailed, "2 delta R - B B^T is not positive semidefinite", m.value);

  const LtiSystem sys = ph_to_lti(ph);
  if (!stability(sys).is_stable) throw Error(ErrorCode::Unstable, "hamiltonian_gramians: system not stable");
  GramianPair g;
  g.Q = delta * ph.H();
  g.Pbreve = delta * spd_inverse(ph.H(), "H");
  g.slack_o = -(g.Q * sys.A + sys.A.transpose() * g.Q + sys.C.transpose() * sys.C);
  g.slack_c = -(sys.A * g.Pbreve + g.Pbreve * sys.A.transpose() + BB);
  g.margin_o = certify_obs(g.Q, sys);
  g.margin_c = certify_ctrl(g.Pbreve, sys);
  return g;
}

namespace {

bool p_like(Side s) { return s == Side::from_P || s == Side::from_T; }

Matrix inv_upper(const Matrix& phi) {
  return phi.triangularView<Eigen::Upper>().solve(Matrix::Identity(phi.rows(), phi.cols()));
}

}  // namespace

StructuredFactorization factorize(const PhSystem& ph, const MatRef& M, Side side) {
  if (M.rows() != ph.n() || M.cols() != ph.n()) throw Error(ErrorCode::DimensionMismatch, "factorize: M shape");
  StructuredFactorization f;
  f.side = side;
  f.phi = upper_cholesky(M, "factorized matrix");
  const Matrix phi_inv = inv_upper(f.phi);
  const Matrix F = ph.F();

  const Matrix K = p_like(side) ? Matrix(f.phi * ph.H() * f.phi.transpose())
                                : Matrix(phi_inv.transpose() * ph.H() * phi_inv);
  SymEig eig = sym_eig(K);
  f.U = eig.vectors;
  f.Lambda_H = eig.values;
  if (!(f.Lambda_H.minCoeff() > 0)) throw Error(ErrorCode::NotPD, "factorize: congruence of H lost definiteness");
  if (p_like(side)) {
    f.Fside = f.U.transpose() * phi_inv.transpose() * F * phi_inv * f.U;
    f.Bside = f.U.transpose() * phi_inv.transpose() * ph.B();
  } else {
    f.Fside = f.U.transpose() * f.phi * F * f.phi.transpose() * f.U;
    f.Bside = f.U.transpose() * f.phi * ph.B();
  }
  return f;
}

namespace {

// Variables y with d = lambda_H y (P/T sides) or d = y / lambda_H (Q/S sides); Lambda_H drops out.
Vector y_to_d(const StructuredFactorization& f, const VecRef& y) {
  return p_like(f.side) ? Vector(y.cwiseProduct(f.Lambda_H)) : Vector(y.cwiseQuotient(f.Lambda_H));
}

Matrix constraint_in_y(const StructuredFactorization& f, const VecRef& y) {
  const Matrix BB = f.Bside * f.Bside.transpose();
  const Matrix YF = p_like(f.side) ? Matrix(y.asDiagonal() * f.Fside) : Matrix(f.Fside * y.asDiagonal());
  return symmetrize(-(YF + YF.transpose()) - BB);
}

AffineLmi build_lmi(const StructuredFactorization& f, double required) {
  const Eigen::Index n = f.Fside.rows();
  AffineLmi lmi;
  lmi.G0 = -f.Bside * f.Bside.transpose() - required * Matrix::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Matrix Gi = Matrix::Zero(n, n);
    if (p_like(f.side))
      Gi.row(i) = -f.Fside.row(i);
    else
      Gi.col(i) = -f.Fside.col(i);
    lmi.G.push_back(Gi + Gi.transpose());
  }
  return lmi;
}

}  // namespace

Matrix diag_constraint(const StructuredFactorization& f, const VecRef& d) {
  const Vector y = p_like(f.side) ? Vector(d.cwiseQuotient(f.Lambda_H)) : Vector(d.cwiseProduct(f.Lambda_H));
  return constraint_in_y(f, y);
}

DiagScaling solve_diag_scaling(const StructuredFactorization& f, bool strict, const VecRef& weights) {
  const Eigen::Index n = f.Fside.rows();
  if (weights.size() != n || !(weights.minCoeff() > 0))
    throw Error(ErrorCode::DimensionMismatch, "solve_diag_scaling: need n positive weights");

  const Matrix BB = f.Bside * f.Bside.transpose();
  const double bbn = spectral_norm(BB);
  const double fsn = spectral_norm(symmetrize(f.Fside));
  DiagScaling out;
  out.required = strict ? tol::kStrict * (bbn > 0 ? bbn : std::max(fsn, 1.0)) : 0.0;

  AffineLmi lmi = build_lmi(f, out.required);
  Vector c = p_like(f.side) ? Vector(weights.cwiseProduct(f.Lambda_H)) : Vector(weights.cwiseQuotient(f.Lambda_H));
  c /= c.maxCoeff();

  const double yref = 10.0 * std::max(bbn, 1e-300) / std::max(fsn, 1e-300);
  const double ymax = 1e16 * yref;
  Vector y = Vector::Constant(n, yref);

  // Phase I: minimize s subject to G(y) + s I > 0.
  const Matrix G_start = lmi.eval(y);
  if (!jacobi_pd(G_start)) {
    AffineLmi ph1 = lmi;
    ph1.G.push_back(Matrix::Identity(n, n));
    ph1.c = Vector::Zero(n + 1);
    ph1.c(n) = 1.0;
    ph1.lo = Vector::Zero(n + 1);
    ph1.lo(n) = -std::numeric_limits<double>::infinity();
    ph1.hi = Vector::Constant(n + 1, ymax);
    ph1.hi(n) = std::numeric_limits<double>::infinity();
    const double s0 = std::max(-min_eig_sym(G_start), 0.0) + 0.1 * (spectral_norm(G_start) + 1e-300);
    Vector z(n + 1);
    z << y, s0;
    BarrierResult r1 = barrier_minimize(ph1, z, 1e-12, 120, [&](const Vector& v) { return v(n) < -1e-6 * s0; });
    out.newton_steps += r1.newton_steps;
    if (!(r1.y(n) < 0))
      throw Error(ErrorCode::Infeasible, "diagonal LMI has no strictly feasible point", -r1.y(n) - out.required);
    y = r1.y.head(n);
  }

  lmi.c = c;
  lmi.lo = Vector::Zero(n);
  lmi.hi = Vector::Constant(n, std::numeric_limits<double>::infinity());
  BarrierResult r2 = barrier_minimize(lmi, y, 1e-10, 120);
  out.newton_steps += r2.newton_steps;

  out.d = y_to_d(f, r2.y);
  out.lambda = out.d.cwiseSqrt();
  const Matrix G = diag_constraint(f, out.d);
  out.margin = min_eig_sym(G);
  out.scaled_margin = jacobi_min_eig(G - out.required * Matrix::Identity(n, n));
  out.certified = out.scaled_margin >= 0.0 && (out.d.array() > 0).all();
  if (!out.certified)
    throw Error(ErrorCode::Infeasible, "diagonal LMI solution failed re-certification", out.scaled_margin);
  return out;
}

namespace {

void apply_order(StructuredBalanceResult& r, const std::vector<int>& perm) {
  const Eigen::Index n = static_cast<Eigen::Index>(perm.size());
  Matrix W(r.W.rows(), n), Winv(n, r.Winv.cols());
  Vector L(n), Lb(n), Hd(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    W.col(j) = r.W.col(perm[j]);
    Winv.row(j) = r.Winv.row(perm[j]);
    L(j) = r.Lambda(perm[j]);
    Lb(j) = r.Lambda_balanced(perm[j]);
    Hd(j) = r.Hbar_diag(perm[j]);
  }
  r.W = W;
  r.Winv = Winv;
  r.Lambda = L;
  r.Lambda_balanced = Lb;
  r.Hbar_diag = Hd;
}

void sort_descending(StructuredBalanceResult& r) { apply_order(r, descending_order(r.Lambda_balanced)); }

double offdiag_ratio(const Matrix& M) {
  Matrix off = M;
  off.diagonal().setZero();
  return spectral_norm(off) / spectral_norm(M);
}

void verify(const PhSystem& ph, StructuredBalanceResult& r) {
  auto [ro, rc] = balancing_residuals(r.W, r.Winv, r.Lambda_balanced, r.Go, r.Gc);
  r.balance_residual = std::max(ro, rc);
  if (!(r.balance_residual <= tol::kBalance))
    throw Error(ErrorCode::StructureLost, "balancing identities violated", r.balance_residual);
  const Matrix Hbar = r.W.transpose() * ph.H() * r.W;
  r.hbar_offdiag = offdiag_ratio(Hbar);
  if (!(r.hbar_offdiag <= tol::kDiag))
    throw Error(ErrorCode::StructureLost, "W^T H W is not diagonal", r.hbar_offdiag);
  const double hd = (Hbar.diagonal() - r.Hbar_diag).cwiseAbs().maxCoeff() / Hbar.diagonal().cwiseAbs().maxCoeff();
  if (!(hd <= tol::kDiag)) throw Error(ErrorCode::StructureLost, "diag(W^T H W) differs from its prediction", hd);
}

// phi^{-1} U D U^T phi^{-T}
Matrix partner_from(const StructuredFactorization& f, const VecRef& d) {
  const Matrix phi_inv = inv_upper(f.phi);
  const Matrix V = phi_inv * f.U;
  return symmetrize(V * d.asDiagonal() * V.transpose());
}

}  // namespace

StructuredBalanceResult struct_balance_generalized(const PhSystem& ph, const MatRef& M, Side side,
                                                   const VecRef& weights) {
  if (side != Side::from_P && side != Side::from_Q)
    throw Error(ErrorCode::Usage, "struct_balance_generalized: side must be from_P or from_Q");
  const LtiSystem sys = ph_to_lti(ph);
  const Margin mc = side == Side::from_P ? certify_ctrl(M, sys) : certify_obs(M, sys);
  if (!mc.ok()) throw Error(ErrorCode::ConditionFailed, "input is not a generalized Gramian", mc.value);

  StructuredBalanceResult r;
  r.side = side;
  const StructuredFactorization f = factorize(ph, M, side);
  r.scaling = solve_diag_scaling(f, true, weights);
  const Vector& lam = r.scaling.lambda;
  const Vector rs = lam.cwiseSqrt();
  r.partner_gramian = partner_from(f, r.scaling.d);
  if (side == Side::from_P) {
    r.Pbreve = symmetrize(M);
    r.Q = r.partner_gramian;
    r.W = f.phi.transpose() * f.U * rs.cwiseInverse().asDiagonal();
    r.Winv = rs.asDiagonal() * f.U.transpose() * inv_upper(f.phi).transpose();
    r.Hbar_diag = f.Lambda_H.cwiseQuotient(lam);
  } else {
    r.Q = symmetrize(M);
    r.Pbreve = r.partner_gramian;
    r.W = inv_upper(f.phi) * f.U * rs.asDiagonal();
    r.Winv = rs.cwiseInverse().asDiagonal() * f.U.transpose() * f.phi;
    r.Hbar_diag = f.Lambda_H.cwiseProduct(lam);
  }
  r.Lambda = lam;
  r.Lambda_balanced = lam;
  r.Go = r.Q;
  r.Gc = r.Pbreve;
  sort_descending(r);
  verify(ph, r);
  return r;
}

StructuredBalanceResult balance_structured_pair(const PhSystem& ph, const MatRef& Go, const MatRef& Gc) {
  BalancedRealization b = balance_pair(Go, Gc);
  StructuredBalanceResult r;
  r.side = Side::from_T;
  r.W = b.W;
  r.Winv = b.Winv;
  r.Lambda = b.Lambda;
  r.Lambda_balanced = b.Lambda;
  r.Go = symmetrize(Go);
  r.Gc = symmetrize(Gc);
  r.Hbar_diag = (r.W.transpose() * ph.H() * r.W).diagonal();
  verify(ph, r);
  return r;
}

StructuredBalanceResult struct_balance_extended(const PhSystem& ph, const MatRef& M, Side side, const MatRef& Gamma,
                                                double scale, const VecRef& weights, const ExtendedOptions& opts) {
  if (side != Side::from_T && side != Side::from_S)
    throw Error(ErrorCode::Usage, "struct_balance_extended: side must be from_T or from_S");
  const LtiSystem sys = ph_to_lti(ph);
  const Eigen::Index n = ph.n();
  const Matrix zero = Matrix::Zero(n, n);
  const Matrix partner_gamma = opts.partner_gamma ? *opts.partner_gamma : zero;
  const bool general_gamma = opts.partner_gamma && opts.partner_gamma->norm() > 0;

  StructuredBalanceResult r;
  if (side == Side::from_T) {
    CtrlCertificate ctrl = build_ctrl_certificate(sys, M, Gamma, scale);
    if (!ctrl.margin.ok()) throw Error(ErrorCode::Infeasible, "T does not certify the controllability LMI", ctrl.margin.value);
    const Matrix Tinv = symmetrize(scale * symmetrize(M) + symmetrize(Gamma));
    const StructuredFactorization f = factorize(ph, Tinv, Side::from_T);
    DiagScaling sc = solve_diag_scaling(f, true, weights);
    const Matrix Q = partner_from(f, sc.d);

    std::function<ObsCertificate(double)> build = [&](double a) {
      return build_obs_certificate(sys, Q, partner_gamma, a);
    };
    std::function<Margin(const ObsCertificate&)> cert = [](const ObsCertificate& c) { return c.margin; };
    ObsCertificate obs;
    if (opts.partner_scale) {
      obs = build(*opts.partner_scale);
      if (!obs.margin.ok()) throw Error(ErrorCode::Infeasible, "S does not certify the observability LMI", obs.margin.value);
    } else {
      obs = find_scale(build, cert, scale).certificate;
    }
    const double alpha = obs.alpha;

    if (general_gamma) {
      r = balance_structured_pair(ph, obs.S, Tinv);
      r.Lambda = r.Lambda_balanced * std::sqrt(alpha);
    } else {
      const Vector& lam = sc.lambda;
      const Vector rs = lam.cwiseSqrt();
      const double a4 = std::pow(alpha, 0.25);
      r.W = a4 * f.phi.transpose() * f.U * rs.cwiseInverse().asDiagonal();
      r.Winv = (1.0 / a4) * rs.asDiagonal() * f.U.transpose() * inv_upper(f.phi).transpose();
      r.Lambda = lam;
      r.Lambda_balanced = lam / std::sqrt(alpha);
      r.Hbar_diag = f.Lambda_H.cwiseQuotient(r.Lambda_balanced);
      r.Go = obs.S;
      r.Gc = Tinv;
      sort_descending(r);
      verify(ph, r);
    }
    r.side = Side::from_T;
    r.scaling = sc;
    r.Q = Q;
    r.Pbreve = symmetrize(M);
    r.partner_gramian = Q;
    r.obs = obs;
    r.ctrl = ctrl;
    return r;
  }

  ObsCertificate obs = build_obs_certificate(sys, M, Gamma, scale);
  if (!obs.margin.ok()) throw Error(ErrorCode::Infeasible, "S does not certify the observability LMI", obs.margin.value);
  const StructuredFactorization f = factorize(ph, obs.S, Side::from_S);
  DiagScaling sc = solve_diag_scaling(f, true, weights);
  const Matrix Pb = partner_from(f, sc.d);

  std::function<CtrlCertificate(double)> build = [&](double b) {
    return build_ctrl_certificate(sys, Pb, partner_gamma, b);
  };
  std::function<Margin(const CtrlCertificate&)> cert = [](const CtrlCertificate& c) { return c.margin; };
  CtrlCertificate ctrl;
  if (opts.partner_scale) {
    ctrl = build(*opts.partner_scale);
    if (!ctrl.margin.ok()) throw Error(ErrorCode::Infeasible, "T does not certify the controllability LMI", ctrl.margin.value);
  } else {
    ctrl = find_scale(build, cert, scale).certificate;
  }
  const double beta = ctrl.beta;
  const Matrix Tinv = symmetrize(beta * Pb + partner_gamma);

  if (general_gamma) {
    r = balance_structured_pair(ph, obs.S, Tinv);
    r.Lambda = r.Lambda_balanced / std::sqrt(beta);
  } else {
    const Vector& lam = sc.lambda;
    const Vector rs = lam.cwiseSqrt();
    const double b4 = std::pow(beta, 0.25);
    r.W = b4 * inv_upper(f.phi) * f.U * rs.asDiagonal();
    r.Winv = (1.0 / b4) * rs.cwiseInverse().asDiagonal() * f.U.transpose() * f.phi;
    r.Lambda = lam;
    r.Lambda_balanced = lam * std::sqrt(beta);
    r.Hbar_diag = f.Lambda_H.cwiseProduct(r.Lambda_balanced);
    r.Go = obs.S;
    r.Gc = Tinv;
    sort_descending(r);
    verify(ph, r);
  }
  r.side = Side::from_S;
  r.scaling = sc;
  r.Q = symmetrize(M);
  r.Pbreve = Pb;
  r.partner_gramian = Pb;
  r.obs = obs;
  r.ctrl = ctrl;
  return r;
}

StructuredBalanceResult permute(const StructuredBalanceResult& r, const std::vector<int>& perm) {
  std::vector<int> check = perm;
  std::sort(check.begin(), check.end());
  for (std::size_t i = 0; i < check.size(); ++i)
    if (check[i] != static_cast<int>(i) || check.size() != static_cast<std::size_t>(r.W.cols()))
      throw Error(ErrorCode::DimensionMismatch, "permute: not a permutation");
  StructuredBalanceResult out = r;
  apply_order(out, perm);
  return out;
}

PhSystem extract_reduced_ph(const PhSystem& ph, const StructuredBalanceResult& r, int k) {
  const int n = ph.n();
  if (k < 1 || k >= n) throw Error(ErrorCode::BadOrder, "extract_reduced_ph: need 1 <= k < n", k);
  const Matrix Hbar = r.W.transpose() * ph.H() * r.W;
  const double h12 = spectral_norm(Hbar.topRightCorner(k, n - k));
  if (!(h12 <= tol::kDiag * spectral_norm(Hbar)))
    throw Error(ErrorCode::StructureLost, "H12 block does not vanish", h12);
  const Matrix Fbar = r.Winv * ph.F() * r.Winv.transpose();
  const Matrix F11 = Fbar.topLeftCorner(k, k);
  PhValidation v = validate_ph(skew_part(F11), -symmetrize(F11), Hbar.topLeftCorner(k, k),
                               (r.Winv * ph.B()).topRows(k));
  if (!v.ok()) throw Error(ErrorCode::StructureLost, v.violations.front().detail, v.violations.front().margin);
  return *v.system;
}

Pairing rlc_pairing(const StructuredBalanceResult& r, int pairs_to_cut, int split, double tol) {
  const int n = static_cast<int>(r.W.cols());
  if (split < 0) split = n / 2;
  Pairing out;
  out.group.resize(n);
  out.home.resize(n);
  for (int j = 0; j < n; ++j) {
    Eigen::Index h = 0;
    r.W.col(j).cwiseAbs().maxCoeff(&h);
    out.home[j] = static_cast<int>(h);
    out.group[j] = h < split ? 0 : 1;
    const double off = out.group[j] == 0 ? r.W.col(j).tail(n - split).norm() : r.W.col(j).head(split).norm();
    if (off > tol * r.W.col(j).norm())
      throw Error(ErrorCode::NotBlockDiagonal, "W mixes the two state partitions", off / r.W.col(j).norm());
  }
  if (pairs_to_cut < 0) throw Error(ErrorCode::BadOrder, "pairs_to_cut must be nonnegative", pairs_to_cut);
  out.k = n - 2 * pairs_to_cut;
  if (pairs_to_cut == 0) {
    out.permutation.resize(n);
    std::iota(out.permutation.begin(), out.permutation.end(), 0);
    out.retained = out.permutation;
    return out;
  }
  std::vector<int> keep[2], cut;
  for (int g = 0; g < 2; ++g) {
    std::vector<int> cols;
    for (int j = 0; j < n; ++j)
      if (out.group[j] == g) cols.push_back(j);
    if (static_cast<int>(cols.size()) <= pairs_to_cut)
      throw Error(ErrorCode::BadOrder, "pairs_to_cut exceeds a block size", pairs_to_cut);
    std::stable_sort(cols.begin(), cols.end(),
                     [&](int a, int b) { return r.Lambda_balanced(a) > r.Lambda_balanced(b); });
    keep[g].assign(cols.begin(), cols.end() - pairs_to_cut);
    cut.insert(cut.end(), cols.end() - pairs_to_cut, cols.end());
    std::sort(keep[g].begin(), keep[g].end(), [&](int a, int b) { return out.home[a] < out.home[b]; });
  }
  std::sort(cut.begin(), cut.end());
  out.retained = keep[0];
  out.retained.insert(out.retained.end(), keep[1].begin(), keep[1].end());
  out.truncated = cut;
  out.permutation = out.retained;
  out.permutation.insert(out.permutation.end(), cut.begin(), cut.end());
  return out;
}

LadderParameters ladder_parameters(const PhSystem& red) {
  const int n = red.n();
  if (n % 2 != 0) throw Error(ErrorCode::DimensionMismatch, "ladder_parameters: odd order");
  const int p = n / 2;
  Vector d(n);
  for (int i = 0; i < p; ++i) {
    const double jii = red.J()(i, p + i);
    if (jii == 0.0) throw Error(ErrorCode::StructureLost, "ladder_parameters: missing section coupling");
    d(i) = std::sqrt(std::abs(jii));
    d(p + i) = std::copysign(d(i), jii);
  }
  const Vector di = d.cwiseInverse();
  const Matrix Jn = di.asDiagonal() * red.J() * di.asDiagonal();
  const Matrix Rn = di.asDiagonal() * red.R() * di.asDiagonal();
  const Matrix Hn = d.asDiagonal() * red.H() * d.asDiagonal();
  const Matrix Bn = di.asDiagonal() * red.B();
  LadderParameters out{{}, {}, {}, {}, {}, PhSystem(Jn, Rn, Hn, Bn)};
  for (int i = 0; i < p; ++i) {
    out.C.push_back(1.0 / Hn(i, i));
    out.L.push_back(1.0 / Hn(p + i, p + i));
    out.R_C.push_back(1.0 / Rn(i, i));
    out.R_L.push_back(Rn(p + i, p + i));
  }
  out.gamma.push_back(Bn(p, 0));
  for (int i = 0; i + 1 < p; ++i) out.gamma.push_back(-Jn(i, p + i + 1));
  return out;
}

}  // namespace ebal
