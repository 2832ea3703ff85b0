#pragma once

#include "ebal/core.hpp"
#include "ebal/sysmodel.hpp"

#include <functional>
#include <string>
#include <vector>

namespace ebal {

// Input signal u(t), broadcast to all m channels unless built from a file.
class Signal {
 public:
  static Signal zero();
  static Signal step(double t0, double level);
  static Signal pulse(double t0, double t1, double level);
  static Signal sine(double amp, double omega);
  static Signal chirp(double amp, double w0, double w1, double horizon);
  static Signal decay(double amp, double rate);
  // Piecewise-linear samples; columns of `values` are channels.
  static Signal piecewise(std::vector<double> times, Matrix values);
  // "zero", "step:t0,level", "pulse:t0,t1,level", "sine:amp,omega", "chirp:amp,w0,w1,T",
  // "decay:amp,rate", "file:path" (CSV t,u1..um with header).
  static Signal parse(const std::string& spec);

  Vector operator()(double t, int m) const;
  const std::string& description() const { return desc_; }

 private:
  std::function<Vector(double, int)> f_;
  std::string desc_;
};

struct Trajectory {
  Vector times;
  Matrix states;   // rows are time steps
  Matrix outputs;
  Matrix inputs;
  double dt = 0.0;
};

// Classical RK4 with fixed step. Throws StepTooLarge.
Trajectory simulate(const LtiSystem& sys, const Signal& u, const VecRef& x0, double horizon, double dt);
// Default step 1e-4 / |spectral abscissa|, capped at 1e-3 and at the RK4 stability limit.
double default_dt(const LtiSystem& sys);

struct DissipationProbe {
  double sigma_n = 0.0;
  double alpha_beta = 0.0;
  Matrix Qbar, Pbar;
  std::vector<double> s_values;
  std::vector<double> supply_integral;
  int violations = 0;
  double worst_excess = 0.0;     // max over steps of dS - supply, relative to tol scale
  double witness = 0.0;          // max |x_r,n(t)|
  double reduced_mismatch = 0.0; // max |y_r - y_hat|
  double tol_diss = 0.0;
};

// Co-simulates the balanced system and the auxiliary reduced system with the cancelling
// signal v, tracking the storage S(z_o, z_c). Throws CertificateMismatch when alpha != beta.
DissipationProbe dissipation_probe(const LtiSystem& balanced, const MatRef& W, const MatRef& Q, const MatRef& P,
                                   const VecRef& Lambda_ST, double alpha, double beta, const Signal& u,
                                   double horizon, double dt);

// (sum |y - yhat|^2 dt)^1/2 / (sum |u|^2 dt)^1/2. Throws ZeroInput.
double l2_gain_estimate(const MatRef& y, const MatRef& yhat, const MatRef& u, double dt);

// sigma_max(C (j w I - A)^{-1} B) over a grid. Parallel kernel and serial reference.
std::vector<double> sigma_max_sweep(const LtiSystem& sys, const std::vector<double>& omegas);
std::vector<double> sigma_max_sweep_serial(const LtiSystem& sys, const std::vector<double>& omegas);
double sigma_max_at(const LtiSystem& sys, double omega);

std::vector<double> log_grid(double w_lo, double w_hi, int points);

struct HinfResult {
  double gamma;
  double omega_peak;
  double sweep_max;
  int iterations;
};

HinfResult hinf_norm_detail(const LtiSystem& sys, double rel_tol = 1e-8);
double hinf_norm(const LtiSystem& sys, double rel_tol = 1e-8);

// [A 0; 0 Ah], [B; Bh], [C -Ch].
LtiSystem error_system(const LtiSystem& full, const LtiSystem& reduced);

}  // namespace ebal
