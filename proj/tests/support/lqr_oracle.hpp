#ifndef VSWARM_TESTS_LQR_ORACLE_HPP
#define VSWARM_TESTS_LQR_ORACLE_HPP

#include <Eigen/Dense>

#include <random>

#include "vswarm/tracker/lqr.hpp"

namespace vswarm::oracle {

struct QpResult
{
  Eigen::VectorXd U;
  double cost = 0.0;
};

/// Condenses the horizon into X = Fx x0 + Gu U + w and solves the normal
/// equations of the stacked least-squares problem directly.
template <int NX, int NU>
QpResult dense_qp(const tracker::LqrProblem<double, NX, NU>& p)
{
  using Eigen::MatrixXd;
  using Eigen::VectorXd;
  const int K = p.K;
  const int nx = NX, nu = NU;
  MatrixXd Gu = MatrixXd::Zero(nx * (K + 1), nu * K);
  VectorXd free = VectorXd::Zero(nx * (K + 1));
  VectorXd x = p.x0;
  free.segment(0, nx) = x;
  for (int k = 0; k < K; ++k) {
    x = p.A * x + p.affine(k);
    free.segment(nx * (k + 1), nx) = x;
    for (int j = 0; j <= k; ++j) {
      const MatrixXd prev = k == j ? MatrixXd::Zero(nx, nu) : MatrixXd(Gu.block(nx * k, nu * j, nx, nu));
      Gu.block(nx * (k + 1), nu * j, nx, nu) = k == j ? MatrixXd(p.B) : MatrixXd(p.A * prev);
    }
  }
  MatrixXd Qbar = MatrixXd::Zero(nx * (K + 1), nx * (K + 1));
  MatrixXd Rbar = MatrixXd::Zero(nu * K, nu * K);
  VectorXd D(nx * (K + 1));
  for (int k = 0; k <= K; ++k) {
    Qbar.block(nx * k, nx * k, nx, nx) = p.Q;
    D.segment(nx * k, nx) = p.target(k);
  }
  for (int k = 0; k < K; ++k) Rbar.block(nu * k, nu * k, nu, nu) = p.R;

  const MatrixXd H = Gu.transpose() * Qbar * Gu + Rbar;
  const VectorXd g = Gu.transpose() * Qbar * (free - D);
  QpResult r;
  r.U = H.ldlt().solve(-g);
  const VectorXd e = free + Gu * r.U - D;
  r.cost = 0.5 * e.dot(Qbar * e) + 0.5 * r.U.dot(Rbar * r.U);
  return r;
}

inline tracker::LqrProblem2 random_lqr(std::mt19937_64& rng)
{
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.05, 5.0);
  std::uniform_int_distribution<int> horizon(1, 20);
  tracker::LqrProblem2 p;
  p.K = horizon(rng);
  p.A = Eigen::Matrix2d::Identity() + 0.3 * Eigen::Matrix2d::NullaryExpr([&] { return n(rng); });
  p.B = Eigen::Vector2d::NullaryExpr([&] { return n(rng); });
  // Rank-deficient Q on some draws.
  Eigen::Matrix2d M = Eigen::Matrix2d::NullaryExpr([&] { return n(rng); });
  if (u(rng) < 1.0) M.row(1).setZero();
  p.Q = M.transpose() * M;
  p.R << u(rng);
  p.x0 = Eigen::Vector2d::NullaryExpr([&] { return 3.0 * n(rng); });
  for (int k = 0; k < p.K; ++k) p.c.push_back(Eigen::Vector2d::NullaryExpr([&] { return 0.5 * n(rng); }));
  for (int k = 0; k <= p.K; ++k) p.x_des.push_back(Eigen::Vector2d::NullaryExpr([&] { return 2.0 * n(rng); }));
  return p;
}

/// DP result against the dense oracle at relative tolerances.
inline bool agrees_with_qp(const tracker::LqrProblem2& p, double cost_tol = 1e-8, double u_tol = 1e-6)
{
  const auto dp = tracker::lqr_solve(p);
  const auto qp = dense_qp(p);
  const double cost_scale = std::max(1.0, std::abs(qp.cost));
  if (std::abs(dp.cost - qp.cost) > cost_tol * cost_scale) return false;
  const double u_scale = std::max(1.0, qp.U.cwiseAbs().maxCoeff());
  for (int k = 0; k < p.K; ++k)
    if (std::abs(dp.U[static_cast<std::size_t>(k)](0) - qp.U(k)) > u_tol * u_scale) return false;
  return true;
}

}  // namespace vswarm::oracle

#endif  // VSWARM_TESTS_LQR_ORACLE_HPP
