#ifndef VSWARM_PLANNER_PLAN_IO_HPP
#define VSWARM_PLANNER_PLAN_IO_HPP

#include <iosfwd>
#include <string>

#include "vswarm/planner/program.hpp"

namespace vswarm::planner {

/// {"n_steps": N, "objective": J, "cavs": [{"id": i, "cells": [{"k", "row", "col"}, ...]}, ...]}
std::string plan_to_json(const OccupancyPlan& plan, int indent = 2);
OccupancyPlan plan_from_json(const std::string& text);

/// Step-by-step table, one line per step and one "(row,col)" column per CAV.
void print_plan_table(std::ostream& os, const OccupancyPlan& plan);

}  // namespace vswarm::planner

#endif  // VSWARM_PLANNER_PLAN_IO_HPP
