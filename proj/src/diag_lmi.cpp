#include "ebal/diag_lmi.hpp"

#include <cmath>
#include <limits>
#include <optional>

namespace ebal {

Matrix AffineLmi::eval(const VecRef& y) const {
  Matrix Z = G0;
  for (std::size_t i = 0; i < G.size(); ++i) Z += y(static_cast<Eigen::Index>(i)) * G[i];
  return symmetrize(Z);
}

namespace {

Vector jacobi_scale(const MatRef& Z) {
  Vector s(Z.rows());
  for (Eigen::Index i = 0; i < Z.rows(); ++i) {
    const double d = std::abs(Z(i, i));
    s(i) = d > 0 ? 1.0 / std::sqrt(d) : 1.0;
  }
  return s;
}

// -log det Z, or nullopt when Z is not positive definite.
std::optional<double> neg_logdet(const MatRef& Z) {
  const Vector s = jacobi_scale(Z);
  Matrix Zs = s.asDiagonal() * Z * s.asDiagonal();
  Eigen::LLT<Matrix> llt(Zs);
  if (llt.info() != Eigen::Success) return std::nullopt;
  double ld = 0.0;
  const Matrix& L = llt.matrixLLT();
  for (Eigen::Index i = 0; i < L.rows(); ++i) {
    if (!(L(i, i) > 0)) return std::nullopt;
    ld += 2.0 * std::log(L(i, i));
  }
  ld -= 2.0 * s.array().log().sum();
  return -ld;
}

std::optional<double> potential(const AffineLmi& p, const Vector& y, double t) {
  double b = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (!(y(i) > p.lo(i)) || !(y(i) < p.hi(i))) return std::nullopt;
    if (std::isfinite(p.lo(i))) b -= std::log(y(i) - p.lo(i));
    if (std::isfinite(p.hi(i))) b -= std::log(p.hi(i) - y(i));
  }
  auto ld = neg_logdet(p.eval(y));
  if (!ld) return std::nullopt;
  return t * p.c.dot(y) + b + *ld;
}

}  // namespace

bool jacobi_pd(const MatRef& M) { return neg_logdet(symmetrize(M)).has_value(); }

double jacobi_min_eig(const MatRef& M) {
  const Matrix S = symmetrize(M);
  const Vector s = jacobi_scale(S);
  return min_eig_sym(s.asDiagonal() * S * s.asDiagonal());
}

BarrierResult barrier_minimize(const AffineLmi& p, Vector y, double rel_gap, int max_outer,
                               const std::function<bool(const Vector&)>& stop) {
  const Eigen::Index nv = y.size();
  const Eigen::Index N = p.G0.rows();
  if (!potential(p, y, 1.0)) throw Error(ErrorCode::Infeasible, "barrier: start point is not strictly feasible");

  Eigen::Index nfinite = 0;
  for (Eigen::Index i = 0; i < nv; ++i)
    nfinite += (std::isfinite(p.hi(i)) ? 1 : 0) + (std::isfinite(p.lo(i)) ? 1 : 0);
  const double nu = static_cast<double>(N + nfinite);

  BarrierResult res;
  double t = nu / std::max(std::abs(p.c.dot(y)), 1e-300);
  for (int outer = 0; outer < max_outer; ++outer) {
    res.outer_steps = outer + 1;
    for (int it = 0; it < 200; ++it) {
      const Matrix Z = p.eval(y);
      const Vector s = jacobi_scale(Z);
      const Matrix Zs = s.asDiagonal() * Z * s.asDiagonal();
      Eigen::LLT<Matrix> llt(Zs);
      std::vector<Matrix> K(nv);
      for (Eigen::Index i = 0; i < nv; ++i) K[i] = llt.solve(s.asDiagonal() * p.G[i] * s.asDiagonal());

      Vector g(nv);
      Matrix Hm = Matrix::Zero(nv, nv);
      for (Eigen::Index i = 0; i < nv; ++i) {
        g(i) = t * p.c(i) - K[i].trace();
        Hm(i, i) = 0.0;
        if (std::isfinite(p.lo(i))) {
          g(i) -= 1.0 / (y(i) - p.lo(i));
          Hm(i, i) += 1.0 / ((y(i) - p.lo(i)) * (y(i) - p.lo(i)));
        }
        if (std::isfinite(p.hi(i))) {
          g(i) += 1.0 / (p.hi(i) - y(i));
          Hm(i, i) += 1.0 / ((p.hi(i) - y(i)) * (p.hi(i) - y(i)));
        }
      }
      for (Eigen::Index i = 0; i < nv; ++i)
        for (Eigen::Index j = 0; j <= i; ++j) {
          const double h = K[i].cwiseProduct(K[j].transpose()).sum();
          Hm(i, j) += h;
          if (i != j) Hm(j, i) += h;
        }
      const Vector dy = -Hm.ldlt().solve(g);
      const double dec = -g.dot(dy);
      ++res.newton_steps;
      if (!(dec > 2e-9)) break;

      const double f0 = *potential(p, y, t);
      double a = 1.0;
      while (a > 1e-16) {
        auto f1 = potential(p, y + a * dy, t);
        if (f1 && *f1 <= f0 - 0.25 * a * dec) break;
        a *= 0.5;
      }
      if (a <= 1e-16) break;
      y += a * dy;
      if (stop && stop(y)) {
        res.y = y;
        return res;
      }
    }
    if (stop && stop(y)) break;
    if (nu / t < rel_gap * std::max(std::abs(p.c.dot(y)), 1e-300)) break;
    t *= 6.0;
  }
  res.y = y;
  return res;
}

}  // namespace ebal
