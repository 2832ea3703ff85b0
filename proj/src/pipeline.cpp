#include "ebal/pipeline.hpp"

#include "ebal/extended.hpp"
#include "ebal/gramians.hpp"
#include "ebal/reference_data.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

namespace ebal {

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::Usage:
    case ErrorCode::BadOrder:
    case ErrorCode::DimensionMismatch:
      return 1;
    case ErrorCode::Io:
    case ErrorCode::ParseError:
      return 3;
    default:
      return 2;
  }
}

namespace {

std::string example_of(const SystemFile& f) {
  auto it = f.metadata.find("example");
  return it == f.metadata.end() ? "" : it->second;
}

Matrix gamma_source(const std::string& src, const std::string& which, const std::string& example, int n) {
  if (src == "zero") return Matrix::Zero(n, n);
  if (src == "appendix") {
    if (example == "msd" && which == "c") return reference::msd_gamma_c();
    if (example == "rlc" && which == "c") return reference::rlc_gamma_c();
    if (example == "rlc" && which == "o") return reference::rlc_gamma_o();
    throw Error(ErrorCode::Usage, "no published Gamma_" + which + " for this system");
  }
  Matrix G = read_matrix_file(src);
  if (G.rows() != n || G.cols() != n) throw Error(ErrorCode::DimensionMismatch, "Gamma_" + which + " shape");
  return G;
}

Vector weight_source(const std::string& src, int n) {
  if (src == "uniform") return Vector::Ones(n);
  if (src == "ascending") return Vector::LinSpaced(n, 1.0, n);
  std::ifstream in(src);
  if (!in) throw Error(ErrorCode::Io, "cannot open weights file " + src);
  std::vector<double> w;
  double x;
  while (in >> x) w.push_back(x);
  if (static_cast<int>(w.size()) != n) throw Error(ErrorCode::DimensionMismatch, "weights file needs n entries");
  return Eigen::Map<Vector>(w.data(), n);
}

int auto_order(const Vector& lambda) {
  int best = 1;
  double ratio = 0.0;
  for (const Gap& g : truncation_gaps(lambda))
    if (g.ratio > ratio) {
      ratio = g.ratio;
      best = g.index;
    }
  return best;
}

void check_cut(const Vector& lambda, int k, bool force) {
  if (force || k <= 0 || k >= lambda.size()) return;
  if (lambda(k - 1) / lambda(k) < tol::kNoGap)
    throw Error(ErrorCode::Usage, "k=" + std::to_string(k) + " cuts inside a tied cluster (use --force)");
}

bool near_zero(const Matrix& M, double scale) { return M.size() == 0 || M.cwiseAbs().maxCoeff() <= 1e-8 * scale; }

// Capacitor/inductor block pattern: J only couples the halves, R and H are diagonal.
bool ladder_form(const PhSystem& ph) {
  const int n = ph.n(), p = n / 2;
  if (n % 2) return false;
  const double js = ph.J().cwiseAbs().maxCoeff();
  Matrix Roff = ph.R(), Hoff = ph.H();
  Roff.diagonal().setZero();
  Hoff.diagonal().setZero();
  return near_zero(ph.J().topLeftCorner(p, p), js) && near_zero(ph.J().bottomRightCorner(p, p), js) &&
         near_zero(Roff, ph.R().cwiseAbs().maxCoeff()) && near_zero(Hoff, ph.H().cwiseAbs().maxCoeff());
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

}  // namespace

PipelineResult run_pipeline(const SystemFile& system, const PipelineParams& prm) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string example = example_of(system);
  auto meta_slack = [&](const std::optional<double>& given, const std::string& key) {
    if (given) return *given;
    auto it = system.metadata.find(key);
    if (it == system.metadata.end()) return 0.0;
    try {
      return std::stod(it->second);
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, "meta " + key + " is not a number");
    }
  };
  const double slack_o = meta_slack(prm.slack_o, "slack_o");
  const double slack_c = meta_slack(prm.slack_c, "slack_c");
  const bool ph_pipeline = prm.pipeline == "gen-ph" || prm.pipeline == "ext-ph";
  if (prm.pipeline != "gen" && prm.pipeline != "ext" && !ph_pipeline)
    throw Error(ErrorCode::Usage, "unknown pipeline '" + prm.pipeline + "'");
  if (prm.k && prm.pairs) throw Error(ErrorCode::Usage, "--k and --pairs are exclusive");
  if (prm.pairs && !ph_pipeline) throw Error(ErrorCode::Usage, "--pairs needs a PH pipeline");

  std::optional<PhSystem> ph;
  if (system.kind == "ph") ph = system.ph();
  if (ph_pipeline && !ph) throw Error(ErrorCode::Usage, "PH pipelines need a 'kind ph' system");

  PipelineResult out;
  out.full = system.lti();
  const int n = out.full.n();
  ReductionReport& rep = out.report;
  rep.set("pipeline", prm.pipeline);
  rep.set("n", std::to_string(n));

  const Matrix I = Matrix::Identity(n, n);
  Matrix W, Winv;
  std::optional<StructuredBalanceResult> sres;

  auto plain_gramians = [&]() -> GramianPair {
    if (prm.delta) {
      if (!ph) throw Error(ErrorCode::Usage, "--delta needs a PH system");
      return hamiltonian_gramians(*ph, *prm.delta);
    }
    return generalized_gramians(out.full, slack_o * I, slack_c * I);
  };

  if (prm.pipeline == "gen" || prm.pipeline == "ext") {
    const GramianPair g = plain_gramians();
    rep.set("margin_o", g.margin_o.value);
    rep.set("margin_c", g.margin_c.value);
    BalancedRealization b;
    if (prm.pipeline == "gen") {
      b = balance_pair(g.Q, g.Pbreve);
    } else {
      const Matrix Go = gamma_source(prm.gamma_o, "o", example, n);
      const Matrix Gc = gamma_source(prm.gamma_c, "c", example, n);
      std::function<CtrlCertificate(double)> bc = [&](double s) {
        return build_ctrl_certificate(out.full, g.Pbreve, Gc, s);
      };
      std::function<ObsCertificate(double)> bo = [&](double s) { return build_obs_certificate(out.full, g.Q, Go, s); };
      auto cc = [](const CtrlCertificate& c) { return c.margin; };
      auto co = [](const ObsCertificate& c) { return c.margin; };
      const std::optional<double> beta = prm.beta ? prm.beta : prm.alpha;
      const std::optional<double> alpha = prm.alpha ? prm.alpha : prm.beta;
      // a common scale keeps the error bound valid when neither is given
      double sa = alpha ? *alpha : 0.0, sb = beta ? *beta : 0.0;
      if (!alpha && !beta) sa = sb = std::max(find_scale<CtrlCertificate>(bc, cc, 1.0).scale,
                                              find_scale<ObsCertificate>(bo, co, 1.0).scale);
      CtrlCertificate ctrl = bc(sb);
      ObsCertificate obs = bo(sa);
      rep.set("alpha", obs.alpha);
      rep.set("beta", ctrl.beta);
      rep.set("lmi13_margin", obs.margin.value);
      rep.set("lmi14_margin", ctrl.margin.value);
      if (!obs.margin.ok()) throw Error(ErrorCode::Infeasible, "observability LMI not certified", obs.margin.value);
      if (!ctrl.margin.ok()) throw Error(ErrorCode::Infeasible, "controllability LMI not certified", ctrl.margin.value);
      b = balance_pair(obs.S, symmetrize(ctrl.beta * g.Pbreve + symmetrize(Gc)));
    }
    W = b.W;
    Winv = b.Winv;
    out.lambda = b.Lambda;
  } else if (prm.pipeline == "gen-ph") {
    const Vector w = weight_source(prm.weights, n);
    if (prm.delta) {
      const GramianPair g = hamiltonian_gramians(*ph, *prm.delta);
      sres = balance_structured_pair(*ph, g.Q, g.Pbreve);
      rep.set("margin_o", g.margin_o.value);
      rep.set("margin_c", g.margin_c.value);
    } else if (prm.side == "Q") {
      const Matrix Q = solve_lyapunov(out.full.A, out.full.C.transpose() * out.full.C + slack_o * I);
      sres = struct_balance_generalized(*ph, Q, Side::from_Q, w);
    } else {
      const Matrix Pb = prm.delta_c ? Matrix(*prm.delta_c * spd_inverse(ph->H(), "H"))
                                    : solve_lyapunov(out.full.A.transpose(),
                                                     out.full.B * out.full.B.transpose() + slack_c * I);
      sres = struct_balance_generalized(*ph, Pb, Side::from_P, w);
    }
  } else {
    const Vector w = weight_source(prm.weights, n);
    const Matrix Gc = gamma_source(prm.gamma_c, "c", example, n);
    const Matrix Go = gamma_source(prm.gamma_o, "o", example, n);
    const Matrix Pb = prm.delta_c ? Matrix(*prm.delta_c * spd_inverse(ph->H(), "H"))
                                  : solve_lyapunov(out.full.A.transpose(),
                                                   out.full.B * out.full.B.transpose() + slack_c * I);
    double beta;
    if (prm.beta) {
      beta = *prm.beta;
    } else {
      std::function<CtrlCertificate(double)> bc = [&](double s) {
        return build_ctrl_certificate(out.full, Pb, Gc, s);
      };
      std::function<Margin(const CtrlCertificate&)> cc = [](const CtrlCertificate& c) { return c.margin; };
      beta = find_scale(bc, cc, 1.0).scale;
    }
    ExtendedOptions opts;
    // without --alpha the search starts at beta, so alpha = beta whenever that certifies
    opts.partner_scale = prm.alpha;
    if (Go.norm() > 0) opts.partner_gamma = Go;
    sres = struct_balance_extended(*ph, Pb, Side::from_T, Gc, beta, w, opts);
    // Neither scale given: raise beta to the certified alpha until both agree.
    for (int it = 0; it < 8 && !prm.alpha && !prm.beta && sres->obs->alpha > beta; ++it) {
      beta = sres->obs->alpha;
      sres = struct_balance_extended(*ph, Pb, Side::from_T, Gc, beta, w, opts);
    }
  }

  if (sres) {
    W = sres->W;
    Winv = sres->Winv;
    out.lambda = sres->Lambda_balanced;
    rep.set("side", to_string(sres->side));
    rep.set("balance_residual", sres->balance_residual);
    rep.set("hbar_offdiag", sres->hbar_offdiag);
    rep.set("hbar_diagonal", yes_no(sres->hbar_offdiag <= tol::kDiag));
    if (sres->obs) {
      rep.set("alpha", sres->obs->alpha);
      rep.set("lmi13_margin", sres->obs->margin.value);
      rep.set("lmi13_certified", yes_no(sres->obs->margin.ok()));
    }
    if (sres->ctrl) {
      rep.set("beta", sres->ctrl->beta);
      rep.set("lmi14_margin", sres->ctrl->margin.value);
      rep.set("lmi14_certified", yes_no(sres->ctrl->margin.ok()));
    }
    if (sres->scaling.d.size()) {
      rep.set("diag_lmi_margin", sres->scaling.margin);
      rep.set("diag_lmi_certified", yes_no(sres->scaling.certified));
    }
  }

  // Choose the retained coordinates.
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  int k;
  if (prm.pairs) {
    const Pairing pr = rlc_pairing(*sres, *prm.pairs);
    k = pr.k;
    perm = pr.permutation;
    out.truncated = pr.truncated;
    if (k == n) throw Error(ErrorCode::BadOrder, "--pairs 0 leaves nothing to truncate");
  } else {
    k = prm.k ? *prm.k : auto_order(out.lambda);
    if (k < 1 || k >= n) throw Error(ErrorCode::BadOrder, "need 1 <= k < n", k);
    check_cut(out.lambda, k, prm.force);
    for (int i = k; i < n; ++i) out.truncated.push_back(i);
  }
  rep.set("k", std::to_string(k));
  out.bound = error_bound(out.lambda, out.truncated);
  rep.set("bound", out.bound.bound);

  if (sres) {
    StructuredBalanceResult pr = permute(*sres, perm);
    W = pr.W;
    Winv = pr.Winv;
    out.reduced_ph = extract_reduced_ph(*ph, pr, k);
    out.reduced = ph_to_lti(*out.reduced_ph);
    rep.set("ph_preserved", "yes");
    rep.set("rlc_block", yes_no(ladder_form(*ph) && ladder_form(*out.reduced_ph)));
    if (prm.pairs && ladder_form(*out.reduced_ph)) {
      out.ladder = ladder_parameters(*out.reduced_ph);
      const LadderParameters& lp = *out.ladder;
      for (std::size_t i = 0; i < lp.C.size(); ++i) {
        const std::string s = std::to_string(i + 1);
        rep.set("ladder.R_C" + s, lp.R_C[i]);
        rep.set("ladder.R_L" + s, lp.R_L[i]);
        rep.set("ladder.C" + s, lp.C[i]);
        rep.set("ladder.L" + s, lp.L[i]);
        rep.set("ladder.gamma" + s, lp.gamma[i]);
      }
      if (example == "rlc" && lp.C.size() == 3) {
        const auto t = reference::rlc_reduced_table();
        double worst = 0.0;
        auto cmp = [&](const std::vector<double>& a, const std::vector<double>& b) {
          for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(std::abs(a[i]) / b[i] - 1.0));
        };
        cmp(lp.R_C, t.R_C);
        cmp(lp.R_L, t.R_L);
        cmp(lp.C, t.C);
        cmp(lp.L, t.L);
        cmp({lp.gamma.begin() + 1, lp.gamma.end()}, {t.gamma.begin() + 1, t.gamma.end()});
        rep.set("table_rel_err_max", worst);
        rep.set("table_within_1pct", yes_no(worst <= 0.01));
      }
    }
  } else {
    rep.set("ph_preserved", "no");
  }

  out.balanced = transform(out.full, W, Winv);
  if (!sres) {
    Matrix Wp(n, n), Wip(n, n);
    for (int j = 0; j < n; ++j) {
      Wp.col(j) = W.col(perm[j]);
      Wip.row(j) = Winv.row(perm[j]);
    }
    out.reduced = truncate(transform(out.full, Wp, Wip), k);
  }

  if (prm.hinf) {
    const double g = hinf_norm(error_system(out.full, out.reduced), prm.tol);
    rep.set("hinf_error", g);
    rep.set("bound_holds", yes_no(g <= out.bound.bound + 1e-6 * std::max(1.0, out.bound.bound)));
  }

  if (prm.simulate) {
    const Signal u = Signal::parse(*prm.simulate);
    const double dt = prm.dt ? *prm.dt : std::min(default_dt(out.full), default_dt(out.reduced));
    const double horizon = prm.horizon ? *prm.horizon : 2000.0 * dt;
    out.traj_full = simulate(out.full, u, Vector::Zero(n), horizon, dt);
    out.traj_reduced = simulate(out.reduced, u, Vector::Zero(out.reduced.n()), horizon, dt);
    rep.set("sim_dt", dt);
    rep.set("sim_horizon", horizon);
    try {
      rep.set("sim_l2_ratio", l2_gain_estimate(out.traj_full->outputs, out.traj_reduced->outputs,
                                               out.traj_full->inputs, dt));
    } catch (const Error&) {
      rep.set("sim_l2_ratio", "nan");
    }
  }

  out.report.lambda.assign(out.lambda.data(), out.lambda.data() + out.lambda.size());
  out.report.truncated.assign(n, false);
  for (int i : out.truncated) out.report.truncated[i] = true;
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  rep.set("elapsed_ms", ms);
  return out;
}

}  // namespace ebal
