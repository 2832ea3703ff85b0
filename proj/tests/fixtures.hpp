#pragma once

#include "ebal/core.hpp"
#include "ebal/sysmodel.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

namespace ebal::test {

inline Matrix mat(int r, int c, std::initializer_list<double> v) {
  Matrix M(r, c);
  auto it = v.begin();
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) M(i, j) = *it++;
  return M;
}

// x' = -x + u, y = x
inline LtiSystem scalar_system() { return LtiSystem(mat(1, 1, {-1}), mat(1, 1, {1}), mat(1, 1, {1})); }

// two decoupled first-order lags
inline LtiSystem diag2_system() {
  return LtiSystem(mat(2, 2, {-1, 0, 0, -3}), mat(2, 1, {1, 1}), mat(1, 2, {1, 1}));
}

// lightly damped oscillator in port-Hamiltonian form with full-rank R
inline PhSystem ph_toy() {
  return PhSystem(mat(2, 2, {0, 1, -1, 0}), mat(2, 2, {0.4, 0, 0, 0.1}), mat(2, 2, {2, 0, 0, 1}),
                  mat(2, 1, {1, 0.5}));
}

// Random Hurwitz system: Gaussian entries shifted left of the spectral radius.
inline LtiSystem random_stable(std::mt19937& rng, int n, int m, int q) {
  std::normal_distribution<double> g(0.0, 1.0);
  auto rnd = [&](int r, int c) {
    Matrix M(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) M(i, j) = g(rng);
    return M;
  };
  Matrix A = rnd(n, n);
  const double rho = Eigen::EigenSolver<Matrix>(A, false).eigenvalues().cwiseAbs().maxCoeff();
  A -= (rho + 0.2) * Matrix::Identity(n, n);
  return LtiSystem(A, rnd(n, m), rnd(q, n));
}

// Solves A^T X + X A + W = 0 through the n^2 vectorized system, independently of the library.
inline Matrix kron_lyapunov(const Matrix& A, const Matrix& W) {
  const int n = static_cast<int>(A.rows());
  const Matrix I = Matrix::Identity(n, n);
  Matrix K = Matrix::Zero(n * n, n * n);
  const Matrix At = A.transpose();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      K.block(i * n, j * n, n, n) += At(i, j) * I;  // (A^T kron I)
      if (i == j) K.block(i * n, j * n, n, n) += At;  // (I kron A^T)
    }
  const Vector w = Eigen::Map<const Vector>(W.data(), n * n);
  const Vector x = K.fullPivLu().solve(-w);
  return Eigen::Map<const Matrix>(x.data(), n, n);
}

// Eigenvalues from the characteristic polynomial (Faddeev-LeVerrier) and Durand-Kerner roots.
inline std::vector<std::complex<double>> charpoly_eigenvalues(const Matrix& A) {
  const int n = static_cast<int>(A.rows());
  std::vector<double> c(n + 1, 0.0);  // monic: lambda^n + c[1] lambda^{n-1} + ... + c[n]
  c[0] = 1.0;
  Matrix M = Matrix::Zero(n, n);
  const Matrix I = Matrix::Identity(n, n);
  for (int k = 1; k <= n; ++k) {
    M = A * M + c[k - 1] * I;
    c[k] = -(A * M).trace() / k;
  }
  auto p = [&](std::complex<double> z) {
    std::complex<double> v = 1.0;
    for (int k = 1; k <= n; ++k) v = v * z + c[k];
    return v;
  };
  double radius = 1.0;
  for (int k = 1; k <= n; ++k) radius = std::max(radius, 1.0 + std::abs(c[k]));
  std::vector<std::complex<double>> z(n);
  for (int i = 0; i < n; ++i) z[i] = std::polar(0.5 * radius, 0.4 + 2.0 * M_PI * i / n);
  for (int it = 0; it < 2000; ++it) {
    double change = 0.0;
    for (int i = 0; i < n; ++i) {
      std::complex<double> den = 1.0;
      for (int j = 0; j < n; ++j)
        if (j != i) den *= z[i] - z[j];
      const std::complex<double> dz = p(z[i]) / den;
      z[i] -= dz;
      change = std::max(change, std::abs(dz));
    }
    if (change < 1e-15 * radius) break;
  }
  return z;
}

inline double rel_diff(const Matrix& a, const Matrix& b) {
  const double s = std::max(a.norm(), b.norm());
  return s > 0 ? (a - b).norm() / s : 0.0;
}

}  // namespace ebal::test
