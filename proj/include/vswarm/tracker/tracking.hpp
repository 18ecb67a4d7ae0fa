#ifndef VSWARM_TRACKER_TRACKING_HPP
#define VSWARM_TRACKER_TRACKING_HPP

#include "vswarm/tracker/lqr.hpp"
#include "vswarm/trajgen.hpp"

namespace vswarm::tracker {

struct LonState
{
  double s = 0.0;
  double v = 0.0;
};

/// Lateral offset from the reference and heading error relative to its tangent.
struct LatState
{
  double l = 0.0;
  double phi = 0.0;
};

struct LonParams
{
  double dt = 0.03;
  double q_s = 1.0;
  double q_v = 1.0;
  double r = 1.0;
  double a_min = -4.0;
  double a_max = 3.0;
  double v_min = 0.0;
  double v_max = 33.0;
};

struct LatParams
{
  double ds = 0.5;
  double q_l = 1.0;
  double q_phi = 1.0;
  double r = 1.0;
  double wheelbase = 2.8;
  double steer_max = 0.6;  ///< front wheel angle bound, rad
};

/// Time-domain speed/position tracking of ref.s_des(t0 + k dt), k = 0..K.
LqrProblem2 build_lon_problem(LonState x0, const ReferencePath& ref, double t0, const LonParams& p, int K);

/// Arc-length-domain lateral tracking starting at arc length sigma0, with
/// curvature feedforward sampled every p.ds.
LqrProblem2 build_lat_problem(LatState x0, const ReferencePath& ref, double sigma0, const LatParams& p, int K);

/// Same, from an explicit curvature sequence (one value per step).
LqrProblem2 build_lat_problem(LatState x0, const std::vector<double>& kappa, const LatParams& p);

}  // namespace vswarm::tracker

#endif  // VSWARM_TRACKER_TRACKING_HPP
