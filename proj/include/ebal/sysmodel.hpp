#pragma once

#include "ebal/core.hpp"

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace ebal {

struct LtiSystem {
  Matrix A, B, C;

  LtiSystem() = default;
  LtiSystem(Matrix a, Matrix b, Matrix c);  // throws DimensionMismatch

  int n() const { return static_cast<int>(A.rows()); }
  int m() const { return static_cast<int>(B.cols()); }
  int q() const { return static_cast<int>(C.rows()); }
};

struct PhValidation;

// tol scales the default relative tolerances (1 keeps tol_psd/tol_pd/skew defaults).
PhValidation validate_ph(const MatRef& J, const MatRef& R, const MatRef& H, const MatRef& B, double tol = 1.0);

class PhSystem {
 public:
  // Validating constructor; throws the first violated invariant.
  PhSystem(const MatRef& J, const MatRef& R, const MatRef& H, const MatRef& B);

  const Matrix& J() const { return J_; }
  const Matrix& R() const { return R_; }
  const Matrix& H() const { return H_; }
  const Matrix& B() const { return B_; }
  Matrix F() const { return J_ - R_; }
  int n() const { return static_cast<int>(H_.rows()); }
  int m() const { return static_cast<int>(B_.cols()); }
  // ||J_in - skew(J_in)|| seen at construction.
  double skew_deviation() const { return skew_dev_; }

 private:
  struct Trusted {};
  PhSystem(Trusted, Matrix J, Matrix R, Matrix H, Matrix B, double dev)
      : J_(std::move(J)), R_(std::move(R)), H_(std::move(H)), B_(std::move(B)), skew_dev_(dev) {}
  friend PhValidation validate_ph(const MatRef&, const MatRef&, const MatRef&, const MatRef&, double);

  Matrix J_, R_, H_, B_;
  double skew_dev_ = 0.0;
};

struct Violation {
  ErrorCode code;
  double margin;
  std::string detail;
};

struct PhValidation {
  std::optional<PhSystem> system;
  std::vector<Violation> violations;

  bool ok() const { return system.has_value(); }
};

LtiSystem ph_to_lti(const PhSystem& ph);

struct StabilityReport {
  std::vector<std::complex<double>> eigenvalues;
  double spectral_abscissa = 0.0;
  bool is_stable = false;
};

StabilityReport stability(const LtiSystem& sys);
StabilityReport stability(const MatRef& A);

// Series mass-spring-damper chain, five masses.
PhSystem build_msd_example();

struct RlcParameters {
  std::vector<double> R_C{270, 1000, 330, 1500, 220};
  std::vector<double> R_L{4.7, 3.9, 2.2, 2.74, 3.92};
  std::vector<double> C{2.2e-3, 1e-3, 3.3e-3, 15e-6, 4.7e-6};
  std::vector<double> L{10e-3, 4.3e-3, 2.7e-3, 6.2e-6, 3e-6};
};

// Ladder of five RC/RL sections, states (q_1..q_5, phi_1..phi_5).
PhSystem build_rlc_example(const RlcParameters& p = {});

}  // namespace ebal
