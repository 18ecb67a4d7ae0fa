#ifndef VSWARM_TRACKER_LQR_HPP
#define VSWARM_TRACKER_LQR_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace vswarm::tracker {

/// Bound on one state component enforced by shaping a scalar control.
template <typename Scalar>
struct StateBound
{
  int index = 0;
  Scalar lo = 0;
  Scalar hi = 0;
};

/// Finite-horizon tracking problem
///
///   min  sum_{k<K} 1/2 (x_k - d_k)' Q (x_k - d_k) + 1/2 u_k' R u_k
///        + 1/2 (x_K - d_K)' Q (x_K - d_K)
///   s.t. x_{k+1} = A x_k + B u_k + c_k
template <typename Scalar, int NX, int NU>
struct LqrProblem
{
  using State = Eigen::Matrix<Scalar, NX, 1>;
  using Control = Eigen::Matrix<Scalar, NU, 1>;

  Eigen::Matrix<Scalar, NX, NX> A = Eigen::Matrix<Scalar, NX, NX>::Identity();
  Eigen::Matrix<Scalar, NX, NU> B = Eigen::Matrix<Scalar, NX, NU>::Zero();
  std::vector<State> c;      ///< K affine terms, or empty for none
  Eigen::Matrix<Scalar, NX, NX> Q = Eigen::Matrix<Scalar, NX, NX>::Identity();
  Eigen::Matrix<Scalar, NU, NU> R = Eigen::Matrix<Scalar, NU, NU>::Identity();
  State x0 = State::Zero();
  std::vector<State> x_des;  ///< K + 1 targets, or a single constant one
  int K = 1;
  Control u_min = Control::Constant(-std::numeric_limits<Scalar>::infinity());
  Control u_max = Control::Constant(std::numeric_limits<Scalar>::infinity());
  std::optional<StateBound<Scalar>> state_bound;

  State affine(int k) const { return c.empty() ? State::Zero().eval() : c[static_cast<std::size_t>(k)]; }
  State target(int k) const
  {
    if (x_des.empty()) return State::Zero();
    return x_des.size() == 1 ? x_des.front() : x_des[static_cast<std::size_t>(k)];
  }
};

template <typename Scalar, int NX, int NU>
struct LqrSolution
{
  using State = Eigen::Matrix<Scalar, NX, 1>;
  using Control = Eigen::Matrix<Scalar, NU, 1>;

  std::vector<Control> U;
  std::vector<State> X;
  /// Feedback law u_k = G_k x_k + H_k.
  std::vector<Eigen::Matrix<Scalar, NU, NX>> G;
  std::vector<Control> H;
  Scalar cost = 0;

  Control feedback(int k, const State& x) const
  {
    const auto i = static_cast<std::size_t>(std::clamp<int>(k, 0, static_cast<int>(G.size()) - 1));
    return G[i] * x + H[i];
  }
};

template <typename Scalar, int NX, int NU>
void check(const LqrProblem<Scalar, NX, NU>& p)
{
  if (p.K < 1) throw std::invalid_argument("lqr: horizon must be at least one step");
  if (!p.c.empty() && static_cast<int>(p.c.size()) != p.K)
    throw std::invalid_argument("lqr: affine terms must cover every step");
  if (p.x_des.size() > 1 && static_cast<int>(p.x_des.size()) != p.K + 1)
    throw std::invalid_argument("lqr: targets must cover every step and the terminal state");
}

/// Objective of a control sequence, propagated from x0.
template <typename Scalar, int NX, int NU>
Scalar lqr_cost(const LqrProblem<Scalar, NX, NU>& p,
                const std::vector<typename LqrProblem<Scalar, NX, NU>::Control>& U)
{
  typename LqrProblem<Scalar, NX, NU>::State x = p.x0;
  Scalar J = 0;
  for (int k = 0; k < p.K; ++k) {
    const auto e = (x - p.target(k)).eval();
    const auto& u = U[static_cast<std::size_t>(k)];
    J += Scalar(0.5) * e.dot(p.Q * e) + Scalar(0.5) * u.dot(p.R * u);
    x = p.A * x + p.B * u + p.affine(k);
  }
  const auto e = (x - p.target(p.K)).eval();
  return J + Scalar(0.5) * e.dot(p.Q * e);
}

/// Backward recursion for the quadratic value function
/// V_k(x) = 1/2 x' Qt_k x + Dt_k' x + Et_k, then a forward rollout.
template <typename Scalar, int NX, int NU>
LqrSolution<Scalar, NX, NU> lqr_solve(const LqrProblem<Scalar, NX, NU>& p)
{
  using MatX = Eigen::Matrix<Scalar, NX, NX>;
  using State = typename LqrProblem<Scalar, NX, NU>::State;
  using Control = typename LqrProblem<Scalar, NX, NU>::Control;
  check(p);

  const auto K = static_cast<std::size_t>(p.K);
  LqrSolution<Scalar, NX, NU> sol;
  sol.G.resize(K);
  sol.H.resize(K);

  const State dK = p.target(p.K);
  MatX Qt = p.Q;
  State Dt = -(p.Q * dK);
  Scalar Et = Scalar(0.5) * dK.dot(p.Q * dK);
  for (int k = p.K - 1; k >= 0; --k) {
    const State c = p.affine(k);
    const State d = p.target(k);
    const Eigen::Matrix<Scalar, NU, NU> M = p.R + p.B.transpose() * Qt * p.B;
    const auto llt = M.llt();
    if (llt.info() != Eigen::Success) throw std::runtime_error("lqr: R + B'QB is not positive definite");
    const Eigen::Matrix<Scalar, NU, NX> G = -llt.solve(p.B.transpose() * Qt * p.A);
    const Control H = -llt.solve(p.B.transpose() * (Qt * c + Dt));
    const MatX S = p.A + p.B * G;
    const State T = p.B * H + c;

    const MatX Qn = p.Q + G.transpose() * p.R * G + S.transpose() * Qt * S;
    const State Dn = -(p.Q * d) + G.transpose() * p.R * H + S.transpose() * (Qt * T + Dt);
    const Scalar En = Scalar(0.5) * d.dot(p.Q * d) + Scalar(0.5) * H.dot(p.R * H) + Scalar(0.5) * T.dot(Qt * T) +
                      Dt.dot(T) + Et;
    Qt = Scalar(0.5) * (Qn + Qn.transpose());
    Dt = Dn;
    Et = En;
    sol.G[static_cast<std::size_t>(k)] = G;
    sol.H[static_cast<std::size_t>(k)] = H;
  }

  sol.X.reserve(K + 1);
  sol.U.reserve(K);
  sol.X.push_back(p.x0);
  for (std::size_t k = 0; k < K; ++k) {
    const State& x = sol.X.back();
    const Control u = sol.G[k] * x + sol.H[k];
    sol.U.push_back(u);
    sol.X.push_back(p.A * x + p.B * u + p.affine(static_cast<int>(k)));
  }
  sol.cost = Scalar(0.5) * p.x0.dot(Qt * p.x0) + Dt.dot(p.x0) + Et;
  return sol;
}

/// Re-runs the feedback law from x0, clipping every control to its box and,
/// when a state bound is set, shaping a scalar control so the bounded state
/// component stays inside it. States follow the true dynamics.
template <typename Scalar, int NX, int NU>
LqrSolution<Scalar, NX, NU> clamp_controls(const LqrSolution<Scalar, NX, NU>& sol, const LqrProblem<Scalar, NX, NU>& p)
{
  using State = typename LqrProblem<Scalar, NX, NU>::State;
  using Control = typename LqrProblem<Scalar, NX, NU>::Control;
  LqrSolution<Scalar, NX, NU> out;
  out.G = sol.G;
  out.H = sol.H;
  out.X.push_back(p.x0);
  bool changed = false;
  for (int k = 0; k < p.K; ++k) {
    const State x = out.X.back();
    const Control raw = sol.G[static_cast<std::size_t>(k)] * x + sol.H[static_cast<std::size_t>(k)];
    Control u = raw.cwiseMax(p.u_min).cwiseMin(p.u_max);
    const State drift = p.A * x + p.affine(k);
    if constexpr (NU == 1) {
      if (p.state_bound) {
        const auto& b = *p.state_bound;
        const Scalar gain = p.B(b.index, 0);
        const Scalar next = drift(b.index) + gain * u(0);
        if (gain != Scalar(0) && (next > b.hi || next < b.lo)) {
          const Scalar goal = next > b.hi ? b.hi : b.lo;
          u(0) = std::clamp((goal - drift(b.index)) / gain, p.u_min(0), p.u_max(0));
        }
      }
    }
    changed = changed || u != raw;
    out.U.push_back(u);
    out.X.push_back(p.A * x + p.B * u + p.affine(k));
  }
  if (!changed) return sol;
  out.cost = lqr_cost(p, out.U);
  return out;
}

using LqrProblem2 = LqrProblem<double, 2, 1>;
using LqrSolution2 = LqrSolution<double, 2, 1>;

}  // namespace vswarm::tracker

#endif  // VSWARM_TRACKER_LQR_HPP
