#ifndef VSWARM_SIM_LOG_IO_HPP
#define VSWARM_SIM_LOG_IO_HPP

#include <istream>
#include <ostream>
#include <string>

#include "vswarm/sim/moe.hpp"
#include "vswarm/sim/simulation.hpp"

namespace vswarm::sim {

/// vehicle_id,kind,t,s,y,v,a; one row per vehicle per tick.
void write_trajectories(std::ostream& os, const SimLog& log);

/// cav_id,t,a_cmd,delta_cmd,s,y,v,phi
void write_controls(std::ostream& os, const SimLog& log);

/// Rebuilds vehicles and ticks from a trajectories CSV. Rows must be grouped
/// by tick with the same vehicle order in every tick. Throws
/// io::CsvParseError with the offending line.
SimLog read_trajectories(std::istream& is);

/// Episode records as JSON. Wall-clock solve times are left out so that
/// repeated runs produce identical files.
std::string episodes_to_json(const SimLog& log);

std::string moes_to_json(const MoeReport& report);

/// {"swarm": ..., "baseline": ..., "comparison": {"uplift_pct": ...}}
std::string comparison_to_json(const MoeReport& swarm, const MoeReport& baseline);

}  // namespace vswarm::sim

#endif  // VSWARM_SIM_LOG_IO_HPP
