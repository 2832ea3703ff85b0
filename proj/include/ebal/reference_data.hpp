#pragma once

#include "ebal/core.hpp"

#include <vector>

// Published matrices and printed values for the two built-in examples.
namespace ebal::reference {

// Mass-spring-damper chain.
Matrix msd_pbreve_printed();  // controllability Gramian for slack 1e-5 I, two decimals
Matrix msd_gamma_c();         // Gamma_c used with beta = 4.8021e7
inline constexpr double msd_beta = 4.8021e7;
inline constexpr double msd_slack_c = 1e-5;
std::vector<double> msd_lambda_qp();
std::vector<double> msd_lambda_st();

// RLC ladder.
inline constexpr double rlc_delta_c = 0.11;
inline constexpr double rlc_beta = 5e8;
Matrix rlc_gamma_c();
Matrix rlc_gamma_o();
Vector rlc_q_printed();  // diagonal of Q
Vector rlc_t_printed();  // diagonal of T
Vector rlc_s_printed();  // diagonal of S
std::vector<double> rlc_lambda_st1();
std::vector<double> rlc_lambda_st2();

struct LadderTable {
  std::vector<double> gamma, R_C, R_L, C, L;
};
LadderTable rlc_reduced_table();

}  // namespace ebal::reference
