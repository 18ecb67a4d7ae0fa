#ifndef VSWARM_TRAJGEN_HPP
#define VSWARM_TRAJGEN_HPP

#include <iosfwd>
#include <vector>

#include "vswarm/grid.hpp"

namespace vswarm {

struct Waypoint
{
  double t = 0.0;
  double s = 0.0;
  double y = 0.0;
};

/// One waypoint per behaviour step: cells[k] is reached at t0 + k * dt_b.
std::vector<Waypoint> generate_waypoints(const std::vector<CellIndex>& cells, const MovingGrid& grid, double dt_b);

/// Clamped cubic spline y(x) through (x_i, y_i) with zero slope at both ends.
class ClampedSpline
{
public:
  ClampedSpline() = default;
  ClampedSpline(std::vector<double> x, std::vector<double> y);

  double value(double x) const;
  double slope(double x) const;
  double second(double x) const;
  double front() const { return x_.front(); }
  double back() const { return x_.back(); }

private:
  std::size_t segment(double x) const;

  std::vector<double> x_, y_, m_;  // m_ holds second derivatives at the knots
};

struct PathSample
{
  double sigma = 0.0;  ///< arc length from the first waypoint
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
  double kappa = 0.0;
};

/// Lateral path through the waypoints plus the desired longitudinal motion.
///
/// Past the last waypoint the path continues straight and the time profile
/// continues at the last segment speed; before the first it holds the first
/// segment speed backwards.
class ReferencePath
{
public:
  ReferencePath() = default;
  ReferencePath(std::vector<Waypoint> waypoints, double ds);

  const std::vector<PathSample>& samples() const { return samples_; }
  const std::vector<Waypoint>& waypoints() const { return waypoints_; }
  double ds() const { return ds_; }

  double y_at(double x) const;
  double heading_at(double x) const;
  double kappa_at(double x) const;
  /// Arc length at longitudinal position x.
  double sigma_at(double x) const;
  /// Curvature at arc length sigma, linearly interpolated between samples.
  double kappa_at_sigma(double sigma) const;

  double s_des(double t) const;
  double v_des(double t) const;

private:
  std::size_t time_segment(double t) const;

  std::vector<Waypoint> waypoints_;
  ClampedSpline spline_;
  std::vector<PathSample> samples_;
  double ds_ = 0.5;
};

ReferencePath build_reference_path(const std::vector<Waypoint>& waypoints, double ds = 0.5);

void write_waypoints_csv(std::ostream& os, int cav_id, const std::vector<Waypoint>& w, bool header = true);
void write_path_csv(std::ostream& os, const ReferencePath& path);

}  // namespace vswarm

#endif  // VSWARM_TRAJGEN_HPP
