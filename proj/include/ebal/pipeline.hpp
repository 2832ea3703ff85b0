#pragma once

#include "ebal/analysis.hpp"
#include "ebal/balancing.hpp"
#include "ebal/ph_preserve.hpp"
#include "ebal/system_io.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ebal {

struct PipelineParams {
  std::string pipeline = "gen";  // gen | ext | gen-ph | ext-ph
  std::optional<int> k;
  std::optional<int> pairs;
  std::optional<double> delta;    // Hamiltonian Gramians Q = delta H, Pbreve = delta H^{-1}
  std::optional<double> delta_c;  // Pbreve = delta_c H^{-1}
  std::optional<double> slack_o;  // multiples of I; unset falls back to the file's meta entry, then 0
  std::optional<double> slack_c;
  std::optional<double> alpha, beta;
  std::string gamma_o = "zero";   // zero | appendix | path
  std::string gamma_c = "zero";
  std::string weights = "uniform";  // uniform | ascending | path
  std::string side = "P";           // P or Q for gen-ph
  double tol = 1e-8;
  bool hinf = false;
  bool force = false;  // allow cutting inside a tied cluster
  std::optional<std::string> simulate;
  std::optional<double> horizon;
  std::optional<double> dt;
};

struct PipelineResult {
  ReductionReport report;
  LtiSystem full;
  LtiSystem balanced;
  LtiSystem reduced;
  std::optional<PhSystem> reduced_ph;
  std::optional<LadderParameters> ladder;
  Vector lambda;
  std::vector<int> truncated;
  ErrorCertificate bound;
  std::optional<Trajectory> traj_full, traj_reduced;
};

PipelineResult run_pipeline(const SystemFile& system, const PipelineParams& params);

// Maps an error to the process exit code: 1 usage, 2 infeasible / structure lost, 3 I/O.
int exit_code_for(ErrorCode code);

}  // namespace ebal
