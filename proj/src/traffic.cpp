#include "vswarm/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace vswarm {

void validate(const IdmParams& p)
{
  if (!(p.v0 > 0 && p.T > 0 && p.a_max > 0 && p.b > 0 && p.s0_jam > 0 && p.vehicle_length > 0))
    throw std::invalid_argument("idm: parameters must be positive");
  if (p.delta_exp < 1) throw std::invalid_argument("idm: acceleration exponent must be at least 1");
  if (!(p.accel_min < 0 && p.accel_max > 0)) throw std::invalid_argument("idm: acceleration range must straddle 0");
}

double idm_accel(const VehicleState& ego, const std::optional<VehicleState>& leader, const IdmParams& p)
{
  double a = p.a_max * (1.0 - std::pow(ego.v / p.v0, p.delta_exp));
  if (leader) {
    const double gap = leader->s - ego.s - p.vehicle_length;
    if (gap <= 0.0) return p.accel_min;
    const double dv = ego.v - leader->v;
    // Dynamic part floored at zero so a faster leader cannot shrink the
    // desired gap below the jam distance.
    const double s_star = p.s0_jam + std::max(0.0, ego.v * p.T + ego.v * dv / (2.0 * std::sqrt(p.a_max * p.b)));
    a -= p.a_max * (s_star / gap) * (s_star / gap);
  }
  return std::clamp(a, p.accel_min, p.accel_max);
}

double idm_equilibrium_gap(double v, const IdmParams& p)
{
  const double free = 1.0 - std::pow(v / p.v0, p.delta_exp);
  if (free <= 0.0) throw std::domain_error("idm: no finite equilibrium gap at or above the desired speed");
  return (p.s0_jam + v * p.T) / std::sqrt(free);
}

VehicleState step_hv(const VehicleState& state, double accel, double dt)
{
  if (!(dt > 0.0)) throw std::invalid_argument("step_hv: dt must be positive");
  VehicleState next = state;
  next.v = std::max(0.0, state.v + accel * dt);
  next.s = state.s + 0.5 * (state.v + next.v) * dt;
  next.a = accel;
  return next;
}

planner::HvForecast forecast_cells(const std::vector<VehicleState>& hvs, const MovingGrid& grid, int n_steps,
                                   double dt_b, const ForecastOptions& options)
{
  if (n_steps < 1) throw std::invalid_argument("forecast_cells: horizon must be at least one step");
  planner::HvForecast f;
  f.n_steps = n_steps;
  for (std::size_t j = 0; j < hvs.size(); ++j) {
    const auto& h = hvs[j];
    const auto col = lane_of(grid, h.y);
    if (!col) throw std::invalid_argument("forecast_cells: HV " + h.id + " is not in any lane");
    planner::HvTrack track;
    track.id = static_cast<int>(j);
    for (int k = 1; k <= n_steps; ++k) {
      const double dt = (k - 1) * dt_b;
      track.cells.push_back(try_world_to_cell(grid, grid.t0 + dt, h.s + h.v * dt, h.y));
    }
    f.hvs.push_back(std::move(track));
  }
  if (options.front_hv) {
    if (*options.front_hv >= hvs.size()) throw std::out_of_range("forecast_cells: front HV index");
    f.front_hv = static_cast<int>(*options.front_hv);
  }
  if (options.detect_lane_events) {
    std::map<int, int> foremost;  // column -> HV index
    for (std::size_t j = 0; j < hvs.size(); ++j) {
      const auto c = f.hvs[j].cells.front();
      if (!c || c->col == options.platoon_col) continue;
      auto it = foremost.find(c->col);
      if (it == foremost.end() || hvs[j].s > hvs[static_cast<std::size_t>(it->second)].s)
        foremost[c->col] = static_cast<int>(j);
    }
    for (const auto& [col, j] : foremost)
      f.detected_lane_events.push_back({1, j, *f.hvs[static_cast<std::size_t>(j)].cells.front()});
  }
  return f;
}

}  // namespace vswarm
