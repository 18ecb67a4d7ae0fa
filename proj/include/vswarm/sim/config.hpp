#ifndef VSWARM_SIM_CONFIG_HPP
#define VSWARM_SIM_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vswarm/planner/program.hpp"
#include "vswarm/planner/solver.hpp"
#include "vswarm/tracker/tracking.hpp"
#include "vswarm/traffic.hpp"

namespace vswarm::sim {

class ConfigError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

enum class Controller { Swarming, Baseline, HvOnly };

/// A lane of HVs: `count` vehicles, the first `lead_s` metres ahead of the
/// rear CAV and the rest `spacing` metres apart (centre to centre) behind it.
/// The lead vehicle drives at `speed` as its desired speed; followers use the
/// shared IDM desired speed.
struct HvStream
{
  std::string name;
  int lane = 1;
  double lead_s = 0.0;
  double spacing = 25.0;
  int count = 5;
  double speed = 17.5;
};

struct CaccParams
{
  double headway = 0.3;
  double standstill_gap = 10.0;
  double k_gap = 0.45;
  double k_speed = 0.8;
};

struct ScenarioConfig
{
  int lane_count = 3;
  double lane_width = 3.0;

  double vehicle_length = 5.0;
  double vehicle_width = 2.0;
  double wheelbase = 2.8;

  int cav_count = 6;
  double cav_spacing = 15.0;  ///< centre to centre
  double cruise_speed = 20.0;
  std::optional<double> initial_speed;  ///< defaults to cruise_speed
  int platoon_lane = 2;
  double rear_cav_s = 0.0;

  bool front_hv = true;
  double front_hv_gap = 30.0;  ///< centre distance ahead of the lead CAV
  double front_hv_speed = 17.5;

  std::vector<HvStream> streams;
  IdmParams idm;

  Controller controller = Controller::Swarming;

  planner::PlannerWeights weights;
  int horizon = 15;
  double safety_distance = 10.0;  ///< d_safe in the cell length
  std::optional<double> cell_length;
  double detection_range = 150.0;
  planner::SolveLimits solve_limits;

  tracker::LonParams lon;
  tracker::LatParams lat;
  CaccParams cacc;

  double dt_b = 3.0;
  double duration = 60.0;

  double min_safety_distance = 5.0;
  double following_range = 100.0;
  /// Travel-time segment; unset means the shortest distance any CAV covers.
  std::optional<double> segment_length;

  std::uint64_t seed = 1;
  double position_jitter = 0.0;  ///< uniform +- metres added to HV start positions

  int ticks_per_step() const;
  int tick_count() const;
};

/// Parses a JSON scenario; every key is optional and falls back to the defaults above.
ScenarioConfig parse_config(const std::string& json_text);
ScenarioConfig load_config(const std::string& path);
std::string config_to_json(const ScenarioConfig& cfg);

/// Throws ConfigError describing the first bad value.
void validate(const ScenarioConfig& cfg);

std::string to_string(Controller c);
Controller controller_from_string(const std::string& s);

}  // namespace vswarm::sim

#endif  // VSWARM_SIM_CONFIG_HPP
