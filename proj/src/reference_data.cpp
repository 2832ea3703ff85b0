#include "ebal/reference_data.hpp"

namespace ebal::reference {

namespace {

Matrix rows10(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix M(rows.size(), rows.begin()->size());
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double v : r) M(i, j++) = v;
    ++i;
  }
  return M;
}

Vector vec(std::initializer_list<double> v) {
  Vector out(v.size());
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

}  // namespace

Matrix msd_pbreve_printed() {
  return rows10({
      {0.97, 0.37, 0.35, 0.29, 0.15, 0, 0.04, 0.15, -0.05, -0.07},
      {0.37, 0.46, 0.44, 0.39, 0.26, -0.13, 0, 0.03, -0.01, -0.01},
      {0.35, 0.44, 0.43, 0.38, 0.26, -0.06, 0, 0, -0.02, -0.02},
      {0.29, 0.39, 0.38, 0.35, 0.24, 0.03, 0, 0.04, 0, -0.01},
      {0.15, 0.26, 0.26, 0.24, 0.18, 0.08, 0, 0.06, 0.02, 0},
      {0, -0.13, -0.06, 0.03, 0.08, 3.77, -0.19, -1.56, -0.78, -0.55},
      {0.04, 0, 0, 0, 0, -0.19, 0.04, 0.32, 0.15, 0.08},
      {0.15, 0.03, 0, 0.04, 0.06, -1.56, 0.32, 2.52, 1.19, 0.63},
      {-0.05, -0.01, -0.02, 0, 0.02, -0.78, 0.15, 1.19, 0.58, 0.32},
      {-0.07, -0.01, -0.02, -0.01, 0, -0.55, 0.08, 0.63, 0.32, 0.18},
  });
}

Matrix msd_gamma_c() {
  return rows10({
      {0.05, -0.1, -0.07, -0.05, -0.03, 1.63, -0.12, -1.01, -0.51, -0.32},
      {-0.1, 0.01, 0, -0.01, 0, -0.56, 0.03, 0.31, 0.17, 0.11},
      {-0.07, 0, -0.01, -0.02, -0.01, -0.57, 0.04, 0.33, 0.17, 0.11},
      {-0.05, -0.01, -0.02, -0.02, -0.01, -0.54, 0.04, 0.35, 0.18, 0.11},
      {-0.03, 0, -0.01, -0.01, -0.01, -0.5, 0.04, 0.34, 0.17, 0.1},
      {1.63, -0.56, -0.57, -0.54, -0.5, -0.29, 0.18, 0.8, 0.11, -0.02},
      {-0.12, 0.03, 0.04, 0.04, 0.04, 0.18, -0.02, -0.11, -0.04, -0.02},
      {-1.01, 0.31, 0.33, 0.35, 0.34, 0.8, -0.11, -0.52, -0.09, -0.03},
      {-0.51, 0.17, 0.17, 0.18, 0.17, 0.11, -0.04, -0.09, 0.04, 0.04},
      {-0.32, 0.11, 0.11, 0.11, 0.1, -0.02, -0.02, -0.03, 0.04, 0.04},
  });
}

std::vector<double> msd_lambda_qp() { return {4.374, 4.316, 2.755, 2.564, 1.188, 0.626, 0.482, 0.324, 0.155, 0.070}; }

std::vector<double> msd_lambda_st() { return {3.71, 3.666, 2.415, 2.218, 0.976, 0.543, 0.401, 0.245, 0.099, 0.041}; }

Matrix rlc_gamma_c() { return Matrix((-vec({14, 4.9, 3.7, 0, 0, 190, 600, 350, 3.9, 10})).asDiagonal()); }

Matrix rlc_gamma_o() { return Matrix((1e12 * vec({0, 0, 0, 0.2, 0.1, 0, 0, 0, 1, 5})).asDiagonal()); }

Vector rlc_q_printed() { return 1e3 * vec({0.39, 0.78, 0.21, 414.89, 134.25, 0.09, 0.19, 0.28, 101.3, 202.93}); }

Vector rlc_t_printed() { return 1e-4 * vec({0.08, 0.18, 0.06, 121.21, 38.68, 0.02, 0.04, 0.07, 29.66, 64.52}); }

Vector rlc_s_printed() { return 1e-5 * vec({0.08, 0.16, 0.04, 82.9, 26.81, 0.02, 0.04, 0.06, 19.87, 38.68}); }

std::vector<double> rlc_lambda_st1() { return {0.31, 0.29, 0.28, 0.26, 0.26}; }

std::vector<double> rlc_lambda_st2() { return {0.31, 0.3, 0.29, 0.26, 0.24}; }

LadderTable rlc_reduced_table() {
  return {{0.69e-4, 1.01, 1.53},
          {127.55, 485.34, 373.01},
          {2.22, 1.89, 2.49},
          {4.66e-3, 2.06e-3, 2.92e-3},
          {4.72e-3, 2.09e-3, 3.05e-3}};
}

}  // namespace ebal::reference
