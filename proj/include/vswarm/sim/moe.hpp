#ifndef VSWARM_SIM_MOE_HPP
#define VSWARM_SIM_MOE_HPP

#include <optional>
#include <string>
#include <vector>

#include "vswarm/sim/simulation.hpp"

namespace vswarm::sim {

struct SpeedStats
{
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  double variance = 0.0;  ///< population variance
  int samples = 0;
};

SpeedStats speed_stats(const std::vector<double>& v);

struct CavMoe
{
  std::string id;
  SpeedStats speed;
  std::optional<double> travel_time;
};

struct FollowingPair
{
  std::string follower;
  std::string leader;
  double avg = 0.0;
  double min = 0.0;
  int samples = 0;
};

struct UpstreamHv
{
  std::string id;
  std::string stream;
  int index = 0;
  double avg_speed = 0.0;
  std::optional<double> reference_speed;
  std::optional<double> reduction_pct;
};

struct MoeReport
{
  std::vector<CavMoe> cavs;
  SpeedStats platoon;  ///< over every CAV sample
  double segment_length = 0.0;
  std::optional<double> travel_time;  ///< until the last CAV clears the segment

  std::vector<FollowingPair> pairs;
  double following_avg = 0.0;
  double following_min = 0.0;
  int following_samples = 0;

  std::vector<UpstreamHv> upstream;
  /// Mean reduction per stream position (index 0 = stream lead), over streams.
  std::vector<double> reduction_by_index;
  std::optional<double> upstream_min_gap;
  double upstream_min_gap_speed = 0.0;
  std::optional<double> upstream_min_gap_headway;
};

struct MoeOptions
{
  double vehicle_length = 5.0;
  double vehicle_width = 2.0;
  double lane_width = 3.0;
  double following_range = 100.0;
  std::optional<double> segment_length;
};

MoeOptions moe_options(const ScenarioConfig& cfg);

/// Shortest distance any CAV covers in the log (0 when there are none).
double covered_distance(const SimLog& log);

/// `reference` is the HV-only run used for upstream speed reductions.
MoeReport compute_moes(const SimLog& log, const SimLog* reference, const MoeOptions& options);

}  // namespace vswarm::sim

#endif  // VSWARM_SIM_MOE_HPP
