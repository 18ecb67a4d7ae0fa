#include "vswarm/tracker/tracking.hpp"

#include <stdexcept>

namespace vswarm::tracker {

LqrProblem2 build_lon_problem(LonState x0, const ReferencePath& ref, double t0, const LonParams& p, int K)
{
  if (!(p.dt > 0.0)) throw std::invalid_argument("longitudinal tracking: dt must be positive");
  if (K < 1) throw std::invalid_argument("longitudinal tracking: horizon must be at least one step");
  if (ref.waypoints().size() < 2) throw std::invalid_argument("longitudinal tracking: empty reference");
  LqrProblem2 q;
  q.K = K;
  q.A << 1.0, p.dt, 0.0, 1.0;
  q.B << 0.0, p.dt;
  q.Q << p.q_s, 0.0, 0.0, p.q_v;
  q.R << p.r;
  q.x0 << x0.s, x0.v;
  q.x_des.reserve(static_cast<std::size_t>(K) + 1);
  for (int k = 0; k <= K; ++k) {
    const double t = t0 + k * p.dt;
    q.x_des.emplace_back(ref.s_des(t), ref.v_des(t));
  }
  q.u_min << p.a_min;
  q.u_max << p.a_max;
  q.state_bound = StateBound<double>{1, p.v_min, p.v_max};
  return q;
}

LqrProblem2 build_lat_problem(LatState x0, const std::vector<double>& kappa, const LatParams& p)
{
  if (!(p.ds > 0.0)) throw std::invalid_argument("lateral tracking: ds must be positive");
  if (!(p.wheelbase > 0.0)) throw std::invalid_argument("lateral tracking: wheelbase must be positive");
  if (kappa.empty()) throw std::invalid_argument("lateral tracking: missing curvature samples");
  LqrProblem2 q;
  q.K = static_cast<int>(kappa.size());
  q.A << 1.0, p.ds, 0.0, 1.0;
  q.B << 0.0, p.ds / p.wheelbase;
  q.Q << p.q_l, 0.0, 0.0, p.q_phi;
  q.R << p.r;
  q.x0 << x0.l, x0.phi;
  q.x_des = {LqrProblem2::State::Zero()};
  q.c.reserve(kappa.size());
  for (double k : kappa) q.c.emplace_back(0.0, -p.ds * k);
  q.u_min << -p.steer_max;
  q.u_max << p.steer_max;
  return q;
}

LqrProblem2 build_lat_problem(LatState x0, const ReferencePath& ref, double sigma0, const LatParams& p, int K)
{
  if (K < 1) throw std::invalid_argument("lateral tracking: horizon must be at least one step");
  std::vector<double> kappa(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) kappa[static_cast<std::size_t>(k)] = ref.kappa_at_sigma(sigma0 + k * p.ds);
  return build_lat_problem(x0, kappa, p);
}

}  // namespace vswarm::tracker
