#include "ebal/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace ebal {

// ---------------------------------------------------------------- signals

Signal Signal::zero() {
  Signal s;
  s.f_ = [](double, int m) { return Vector::Zero(m); };
  s.desc_ = "zero";
  return s;
}

Signal Signal::step(double t0, double level) {
  Signal s;
  s.f_ = [=](double t, int m) { return Vector::Constant(m, t >= t0 ? level : 0.0); };
  s.desc_ = "step";
  return s;
}

Signal Signal::pulse(double t0, double t1, double level) {
  Signal s;
  s.f_ = [=](double t, int m) { return Vector::Constant(m, (t >= t0 && t < t1) ? level : 0.0); };
  s.desc_ = "pulse";
  return s;
}

Signal Signal::sine(double amp, double omega) {
  Signal s;
  s.f_ = [=](double t, int m) { return Vector::Constant(m, amp * std::sin(omega * t)); };
  s.desc_ = "sine";
  return s;
}

Signal Signal::chirp(double amp, double w0, double w1, double horizon) {
  Signal s;
  const double k = (w1 - w0) / horizon;
  s.f_ = [=](double t, int m) { return Vector::Constant(m, amp * std::sin(w0 * t + 0.5 * k * t * t)); };
  s.desc_ = "chirp";
  return s;
}

Signal Signal::decay(double amp, double rate) {
  Signal s;
  s.f_ = [=](double t, int m) { return Vector::Constant(m, amp * std::exp(-rate * t)); };
  s.desc_ = "decay";
  return s;
}

Signal Signal::piecewise(std::vector<double> times, Matrix values) {
  if (times.empty() || static_cast<Eigen::Index>(times.size()) != values.rows())
    throw Error(ErrorCode::DimensionMismatch, "piecewise signal: times and values differ");
  Signal s;
  s.f_ = [times = std::move(times), values = std::move(values)](double t, int m) {
    if (values.cols() != m && values.cols() != 1)
      throw Error(ErrorCode::DimensionMismatch, "piecewise signal: channel count");
    auto row = [&](Eigen::Index i) -> Vector {
      return values.cols() == m ? Vector(values.row(i).transpose()) : Vector::Constant(m, values(i, 0));
    };
    if (t <= times.front()) return row(0);
    if (t >= times.back()) return row(static_cast<Eigen::Index>(times.size()) - 1);
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const Eigen::Index i = (it - times.begin()) - 1;
    const double a = (t - times[i]) / (times[i + 1] - times[i]);
    return Vector((1 - a) * row(i) + a * row(i + 1));
  };
  s.desc_ = "piecewise";
  return s;
}

namespace {

std::vector<double> parse_args(const std::string& body, std::size_t count, const std::string& spec) {
  std::vector<double> v;
  std::stringstream ss(body);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      v.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw Error(ErrorCode::Usage, "bad number in signal spec '" + spec + "'");
    }
  }
  if (v.size() != count) throw Error(ErrorCode::Usage, "signal spec '" + spec + "' expects " + std::to_string(count) + " values");
  return v;
}

Signal read_signal_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open signal file " + path);
  std::string line;
  std::getline(in, line);  // header
  std::vector<double> times;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    std::vector<double> r;
    while (std::getline(ss, tok, ',')) r.push_back(std::stod(tok));
    if (r.size() < 2) throw Error(ErrorCode::ParseError, "signal file row needs t and at least one channel");
    times.push_back(r[0]);
    rows.emplace_back(r.begin() + 1, r.end());
  }
  if (rows.empty()) throw Error(ErrorCode::ParseError, "signal file has no samples");
  Matrix vals(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) throw Error(ErrorCode::ParseError, "ragged signal file");
    for (std::size_t j = 0; j < rows[i].size(); ++j) vals(i, j) = rows[i][j];
  }
  return Signal::piecewise(std::move(times), std::move(vals));
}

}  // namespace

Signal Signal::parse(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string body = colon == std::string::npos ? "" : spec.substr(colon + 1);
  Signal s;
  if (kind == "zero") {
    s = zero();
  } else if (kind == "step") {
    auto a = parse_args(body, 2, spec);
    s = step(a[0], a[1]);
  } else if (kind == "pulse") {
    auto a = parse_args(body, 3, spec);
    s = pulse(a[0], a[1], a[2]);
  } else if (kind == "sine") {
    auto a = parse_args(body, 2, spec);
    s = sine(a[0], a[1]);
  } else if (kind == "chirp") {
    auto a = parse_args(body, 4, spec);
    s = chirp(a[0], a[1], a[2], a[3]);
  } else if (kind == "decay") {
    auto a = parse_args(body, 2, spec);
    s = decay(a[0], a[1]);
  } else if (kind == "file") {
    s = read_signal_csv(body);
  } else {
    throw Error(ErrorCode::Usage, "unknown signal kind '" + kind + "'");
  }
  s.desc_ = spec;
  return s;
}

Vector Signal::operator()(double t, int m) const { return f_(t, m); }

// ---------------------------------------------------------------- simulation

namespace {

double spectral_radius(const MatRef& A) {
  if (A.rows() == 0) return 0.0;
  Eigen::EigenSolver<Matrix> es(A, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

void check_step(const LtiSystem& sys, double dt) {
  if (!(dt > 0)) throw Error(ErrorCode::StepTooLarge, "dt must be positive", dt);
  if (sys.n() == 0) return;
  const StabilityReport rep = stability(sys);
  if (dt * std::abs(rep.spectral_abscissa) > 0.1)
    throw Error(ErrorCode::StepTooLarge, "dt exceeds 0.1 / |spectral abscissa|", dt);
  // RK4 is stable for real eigenvalues down to about -2.78 / dt.
  if (dt * spectral_radius(sys.A) > 2.5)
    throw Error(ErrorCode::StepTooLarge, "dt beyond the RK4 stability region", dt);
}

}  // namespace

double default_dt(const LtiSystem& sys) {
  const double a = std::abs(stability(sys).spectral_abscissa);
  double dt = std::min(1e-3, 1e-4 / a);
  const double rho = spectral_radius(sys.A);
  if (rho > 0) dt = std::min(dt, 1.0 / rho);
  return dt;
}

Trajectory simulate(const LtiSystem& sys, const Signal& u, const VecRef& x0, double horizon, double dt) {
  check_step(sys, dt);
  if (!(horizon >= dt)) throw Error(ErrorCode::Usage, "horizon must be at least dt");
  if (x0.size() != sys.n()) throw Error(ErrorCode::DimensionMismatch, "x0 size");
  const int steps = static_cast<int>(std::llround(horizon / dt));
  const int m = sys.m();
  Trajectory tr;
  tr.dt = dt;
  tr.times.resize(steps + 1);
  tr.states.resize(steps + 1, sys.n());
  tr.outputs.resize(steps + 1, sys.q());
  tr.inputs.resize(steps + 1, m);

  auto f = [&](const Vector& x, double t) -> Vector { return sys.A * x + sys.B * u(t, m); };
  Vector x = x0;
  for (int i = 0; i <= steps; ++i) {
    const double t = i * dt;
    tr.times(i) = t;
    tr.states.row(i) = x.transpose();
    tr.outputs.row(i) = (sys.C * x).transpose();
    tr.inputs.row(i) = u(t, m).transpose();
    if (i == steps) break;
    const Vector k1 = f(x, t);
    const Vector k2 = f(x + 0.5 * dt * k1, t + 0.5 * dt);
    const Vector k3 = f(x + 0.5 * dt * k2, t + 0.5 * dt);
    const Vector k4 = f(x + dt * k3, t + dt);
    x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return tr;
}

// ---------------------------------------------------------------- dissipation probe

DissipationProbe dissipation_probe(const LtiSystem& bal, const MatRef& W, const MatRef& Q, const MatRef& P,
                                   const VecRef& Lambda_ST, double alpha, double beta, const Signal& u,
                                   double horizon, double dt) {
  if (std::abs(alpha - beta) > 1e-12 * std::max(std::abs(alpha), std::abs(beta)))
    throw Error(ErrorCode::CertificateMismatch, "dissipation probe needs alpha = beta", alpha - beta);
  check_step(bal, dt);
  const int n = bal.n(), m = bal.m(), k = n - 1;

  DissipationProbe pr;
  pr.alpha_beta = alpha;
  pr.sigma_n = Lambda_ST(n - 1);
  pr.Qbar = symmetrize(W.transpose() * Q * W);
  pr.Pbar = symmetrize(W.transpose() * P * W);
  const double s2 = pr.sigma_n * pr.sigma_n;

  const Matrix& A = bal.A;
  const Matrix& B = bal.B;
  const Matrix& C = bal.C;
  const Matrix A11 = A.topLeftCorner(k, k), B1 = B.topRows(k), C1 = C.leftCols(k);

  // z = [xbar (n), x_r (n), xhat (k), w (1)]
  const int N = 2 * n + k + 1;
  auto rhs = [&](const Vector& z, double t) -> Vector {
    const Vector uu = u(t, m);
    const auto xb = z.segment(0, n);
    const auto xr = z.segment(n, n);
    const auto xh = z.segment(2 * n, k);
    Vector dz(N);
    dz.segment(0, n) = A * xb + B * uu;
    Vector dxr = A * xr + B * uu;
    const double v = -((A.row(n - 1).head(k) * xr.head(k))(0) + (B.row(n - 1) * uu)(0));
    dxr(n - 1) += v;
    dz.segment(n, n) = dxr;
    dz.segment(2 * n, k) = A11 * xh + B1 * uu;
    const Vector e = C * (xb - xr);
    dz(N - 1) = 4.0 * s2 * uu.squaredNorm() - e.squaredNorm();
    return dz;
  };
  auto storage = [&](const Vector& z) {
    const Vector zo = z.segment(0, n) - z.segment(n, n);
    const Vector zc = z.segment(0, n) + z.segment(n, n);
    return zo.dot(pr.Qbar * zo) + s2 * zc.dot(pr.Pbar * zc);
  };

  const int steps = static_cast<int>(std::llround(horizon / dt));
  Vector z = Vector::Zero(N);
  double supply_in = 0.0;
  pr.s_values.push_back(storage(z));
  pr.supply_integral.push_back(0.0);
  for (int i = 0; i < steps; ++i) {
    const double t = i * dt;
    const Vector k1 = rhs(z, t);
    const Vector k2 = rhs(z + 0.5 * dt * k1, t + 0.5 * dt);
    const Vector k3 = rhs(z + 0.5 * dt * k2, t + 0.5 * dt);
    const Vector k4 = rhs(z + dt * k3, t + dt);
    z += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    supply_in += dt * 4.0 * s2 * u(t + 0.5 * dt, m).squaredNorm();
    pr.s_values.push_back(storage(z));
    pr.supply_integral.push_back(z(N - 1));
    pr.witness = std::max(pr.witness, std::abs(z(2 * n - 1)));
    const double yr_mismatch =
        k > 0 ? (C * z.segment(n, n) - C1 * z.segment(2 * n, k)).cwiseAbs().maxCoeff()
              : (C * z.segment(n, n)).cwiseAbs().maxCoeff();
    pr.reduced_mismatch = std::max(pr.reduced_mismatch, yr_mismatch);
  }

  double scale = supply_in;
  for (double s : pr.s_values) scale = std::max(scale, s);
  pr.tol_diss = 1e-6 * scale;
  for (std::size_t i = 1; i < pr.s_values.size(); ++i) {
    const double excess = (pr.s_values[i] - pr.s_values[i - 1]) - (pr.supply_integral[i] - pr.supply_integral[i - 1]);
    if (excess > pr.tol_diss) ++pr.violations;
    pr.worst_excess = std::max(pr.worst_excess, excess);
  }
  const double total = (pr.s_values.back() - pr.s_values.front()) - pr.supply_integral.back();
  if (total > pr.tol_diss) ++pr.violations;
  return pr;
}

double l2_gain_estimate(const MatRef& y, const MatRef& yhat, const MatRef& u, double dt) {
  if (y.rows() != yhat.rows() || y.cols() != yhat.cols() || y.rows() != u.rows())
    throw Error(ErrorCode::DimensionMismatch, "l2_gain_estimate: trajectories not aligned");
  const double den = std::sqrt(u.squaredNorm() * dt);
  if (den == 0.0) throw Error(ErrorCode::ZeroInput, "input has zero energy");
  return std::sqrt((y - yhat).squaredNorm() * dt) / den;
}

// ---------------------------------------------------------------- frequency domain

double sigma_max_at(const LtiSystem& sys, double omega) {
  const Eigen::Index n = sys.n();
  const std::complex<double> jw(0.0, omega);
  CMatrix M = jw * CMatrix::Identity(n, n) - sys.A.cast<std::complex<double>>();
  CMatrix X = M.partialPivLu().solve(sys.B.cast<std::complex<double>>());
  CMatrix G = sys.C.cast<std::complex<double>>() * X;
  Eigen::JacobiSVD<CMatrix> svd(G);
  return svd.singularValues()(0);
}

std::vector<double> sigma_max_sweep_serial(const LtiSystem& sys, const std::vector<double>& omegas) {
  std::vector<double> out(omegas.size());
  for (std::size_t i = 0; i < omegas.size(); ++i) out[i] = sigma_max_at(sys, omegas[i]);
  return out;
}

std::vector<double> sigma_max_sweep(const LtiSystem& sys, const std::vector<double>& omegas) {
  std::vector<double> out(omegas.size());
  const long long np = static_cast<long long>(omegas.size());
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < np; ++i) out[i] = sigma_max_at(sys, omegas[i]);
  return out;
}

std::vector<double> log_grid(double w_lo, double w_hi, int points) {
  std::vector<double> w(points);
  const double a = std::log10(w_lo), b = std::log10(w_hi);
  for (int i = 0; i < points; ++i) w[i] = std::pow(10.0, points > 1 ? a + (b - a) * i / (points - 1) : a);
  return w;
}

LtiSystem error_system(const LtiSystem& full, const LtiSystem& red) {
  const Eigen::Index n = full.n(), k = red.n();
  Matrix A = Matrix::Zero(n + k, n + k);
  A.topLeftCorner(n, n) = full.A;
  A.bottomRightCorner(k, k) = red.A;
  Matrix B(n + k, full.m());
  B << full.B, red.B;
  Matrix C(full.q(), n + k);
  C << full.C, -red.C;
  return LtiSystem(A, B, C);
}

HinfResult hinf_norm_detail(const LtiSystem& sys, double rel_tol) {
  const StabilityReport rep = stability(sys);
  if (!rep.is_stable) throw Error(ErrorCode::Unstable, "hinf_norm: system not stable", rep.spectral_abscissa);
  const Eigen::Index n = sys.n();

  double wmin = std::numeric_limits<double>::infinity(), wmax = 0.0;
  for (const auto& l : rep.eigenvalues) {
    wmin = std::min(wmin, std::abs(l));
    wmax = std::max(wmax, std::abs(l));
  }
  std::vector<double> grid = log_grid(1e-3 * wmin, 1e3 * wmax, 400);
  for (const auto& l : rep.eigenvalues)
    if (l.imag() > 0) grid.push_back(l.imag());
  grid.push_back(0.0);
  const std::vector<double> sig = sigma_max_sweep(sys, grid);
  const auto best = std::max_element(sig.begin(), sig.end());
  HinfResult res{*best, grid[best - sig.begin()], *best, 0};
  if (res.gamma == 0.0) return res;

  const Matrix BB = sys.B * sys.B.transpose();
  const Matrix CC = sys.C.transpose() * sys.C;
  // Frequencies where the Hamiltonian matrix has (near) imaginary eigenvalues.
  auto crossings = [&](double g) {
    Matrix Hm(2 * n, 2 * n);
    Hm << sys.A, BB / g, -CC / g, -sys.A.transpose();
    Eigen::EigenSolver<Matrix> es(Hm, false);
    std::vector<double> ws;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      const auto l = es.eigenvalues()(i);
      if (std::abs(l.real()) <= 1e-7 * std::max(std::abs(l), wmin) && l.imag() >= 0) ws.push_back(l.imag());
    }
    return ws;
  };

  double lo = res.gamma, hi = 2.0 * res.gamma;
  // Raise the upper bracket until no crossing is confirmed.
  for (int guard = 0; guard < 60; ++guard) {
    bool confirmed = false;
    for (double w : crossings(hi)) {
      const double s = sigma_max_at(sys, w);
      if (s > lo) {
        lo = s;
        res.omega_peak = w;
      }
      if (s >= hi) confirmed = true;
    }
    if (!confirmed) break;
    hi *= 2.0;
  }
  while (hi - lo > rel_tol * hi && res.iterations < 200) {
    ++res.iterations;
    const double mid = 0.5 * (lo + hi);
    bool above = false;
    for (double w : crossings(mid)) {
      const double s = sigma_max_at(sys, w);
      if (s > lo) {
        lo = s;
        res.omega_peak = w;
      }
      if (s >= mid * (1.0 - 1e-12)) above = true;
    }
    if (!above) hi = mid;
  }
  res.gamma = lo;
  return res;
}

double hinf_norm(const LtiSystem& sys, double rel_tol) { return hinf_norm_detail(sys, rel_tol).gamma; }

}  // namespace ebal
