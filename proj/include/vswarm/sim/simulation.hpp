#ifndef VSWARM_SIM_SIMULATION_HPP
#define VSWARM_SIM_SIMULATION_HPP

#include <string>
#include <vector>

#include "vswarm/grid.hpp"
#include "vswarm/planner/program.hpp"
#include "vswarm/planner/solver.hpp"
#include "vswarm/sim/config.hpp"
#include "vswarm/traffic.hpp"

namespace vswarm::sim {

/// Static identity of a simulated vehicle. Stream members carry the stream
/// name and their 1-based position in it (1 = stream lead).
struct VehicleInfo
{
  std::string id;
  VehicleKind kind = VehicleKind::Hv;
  std::string stream;
  int stream_index = 0;
};

struct Body
{
  VehicleState state;
  double heading = 0.0;  ///< CAVs only; HVs keep their lane
};

struct World
{
  double t = 0.0;
  int tick = 0;
  std::vector<Body> bodies;  ///< CAVs first, then HVs
};

struct Command
{
  double accel = 0.0;
  double steer = 0.0;
};

struct Road
{
  std::vector<double> lane_y;
  double vehicle_length = 5.0;
  double vehicle_width = 2.0;
  double wheelbase = 2.8;
};

struct Collision
{
  double t = 0.0;
  int tick = 0;
  std::string a, b;
};

struct TickResult
{
  World world;
  std::vector<Collision> collisions;
};

/// Advances every vehicle by one tick: CAVs with an Euler kinematic bicycle
/// (state on the rear axle), HVs with step_hv in their lane. Overlapping
/// length x width footprints are reported after the move.
TickResult step_tick(const World& world, const std::vector<Command>& commands, const Road& road, double dt);

std::vector<Collision> find_collisions(const World& world, const Road& road);

struct TickRecord
{
  double t = 0.0;
  std::vector<VehicleState> vehicles;  ///< same order as SimLog::vehicles
};

struct ControlRecord
{
  std::string cav_id;
  double t = 0.0;
  double a_cmd = 0.0;
  double steer_cmd = 0.0;
  double s = 0.0;
  double y = 0.0;
  double v = 0.0;
  double phi = 0.0;  ///< heading error against the reference (heading in baseline)
};

struct EpisodeRecord
{
  int index = 0;
  int tick = 0;
  double t = 0.0;
  std::string trigger;  ///< "start", "plan-complete" or "new-hv"
  GridMode mode = GridMode::Overtaking;
  MovingGrid grid;
  std::vector<std::string> hv_ids;  ///< forecast order
  std::vector<CellIndex> init_cells;
  planner::HvForecast forecast;  ///< after dropping lane events no CAV can serve
  int delta = 0;
  std::vector<planner::BlockingAssignment> blocking;
  planner::OccupancyPlan plan;
  planner::SolveStats stats;
  int violations = 0;  ///< independent re-check of the solved plan
};

struct SimLog
{
  Controller controller = Controller::Swarming;
  double dt = 0.03;
  std::vector<VehicleInfo> vehicles;
  std::vector<TickRecord> ticks;
  std::vector<ControlRecord> controls;
  std::vector<EpisodeRecord> episodes;
  std::vector<Collision> collisions;
  bool aborted = false;
  std::string abort_reason;

  std::vector<std::size_t> cav_indices() const;
};

World initial_world(const ScenarioConfig& cfg, Controller controller, std::vector<VehicleInfo>* info = nullptr);

Road road_of(const ScenarioConfig& cfg);

/// Runs the closed loop for cfg.duration with cfg.controller. Planner
/// failures and collisions stop the run early with `aborted` set.
SimLog run_scenario(const ScenarioConfig& cfg);
SimLog run_scenario(const ScenarioConfig& cfg, Controller controller);

/// The first planning episode of a scenario, without running the loop.
EpisodeRecord plan_first_episode(const ScenarioConfig& cfg);

}  // namespace vswarm::sim

#endif  // VSWARM_SIM_SIMULATION_HPP
