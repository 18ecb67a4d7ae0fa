#ifndef VSWARM_PLANNER_VALIDATE_HPP
#define VSWARM_PLANNER_VALIDATE_HPP

#include <string>
#include <vector>

#include "vswarm/planner/program.hpp"

namespace vswarm::planner {

/// One broken rule found in a decoded plan. `cav` and `step` are 1-based;
/// `other` is a second CAV (1-based) or an HV index depending on the family,
/// -1 when unused. `cell` is the cell the rule was evaluated at.
struct Violation
{
  Family family = Family::Occupancy;
  int cav = 0;
  int step = 0;
  int other = -1;
  CellIndex cell;
  std::string detail;
};

std::string describe(const Violation& v);

/// Checks a plan cell by cell against the planning rules, without going
/// through the binary program.
std::vector<Violation> validate_plan(const PlanningScene& scene, const OccupancyPlan& plan);

std::vector<Violation> validate_plan(const OccupancyPlan& plan, const MovingGrid& grid, const HvForecast& forecast,
                                     const std::vector<CellIndex>& init_cells);

}  // namespace vswarm::planner

#endif  // VSWARM_PLANNER_VALIDATE_HPP
