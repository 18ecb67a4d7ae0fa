#ifndef VSWARM_TRAFFIC_HPP
#define VSWARM_TRAFFIC_HPP

#include <optional>
#include <string>
#include <vector>

#include "vswarm/grid.hpp"
#include "vswarm/planner/program.hpp"

namespace vswarm {

enum class VehicleKind { Cav, Hv };

struct VehicleState
{
  std::string id;
  VehicleKind kind = VehicleKind::Hv;
  double s = 0.0;
  double y = 0.0;
  double v = 0.0;
  double a = 0.0;
  int lane = 1;
};

struct IdmParams
{
  double v0 = 17.5;
  double T = 1.2;
  double a_max = 1.4;
  double b = 2.0;
  double s0_jam = 2.0;
  double delta_exp = 4.0;
  double vehicle_length = 5.0;
  /// Output range; a non-positive gap returns accel_min.
  double accel_min = -4.0;
  double accel_max = 3.0;
};

void validate(const IdmParams& p);

double idm_accel(const VehicleState& ego, const std::optional<VehicleState>& leader, const IdmParams& p);

/// Equilibrium bumper gap at speed v behind a leader of the same speed.
double idm_equilibrium_gap(double v, const IdmParams& p);

/// Trapezoidal position update with the speed floored at zero:
/// v' = max(0, v + a dt), s' = s + (v + v') dt / 2.
VehicleState step_hv(const VehicleState& state, double accel, double dt);

struct ForecastOptions
{
  /// Column the platoon drives in; HVs elsewhere may raise lane events.
  int platoon_col = 2;
  /// Index into the HV list of the vehicle being overtaken.
  std::optional<std::size_t> front_hv;
  /// Report the foremost in-grid HV of each other lane as a step-1 event.
  bool detect_lane_events = false;
};

/// Constant-velocity cells of every HV at steps 1..N (step 1 is now).
/// Throws std::invalid_argument for an HV that sits in no lane.
planner::HvForecast forecast_cells(const std::vector<VehicleState>& hvs, const MovingGrid& grid, int n_steps,
                                   double dt_b, const ForecastOptions& options = {});

}  // namespace vswarm

#endif  // VSWARM_TRAFFIC_HPP
