#ifndef VSWARM_GRID_HPP
#define VSWARM_GRID_HPP

#include <optional>
#include <vector>

#include "vswarm/common.hpp"

namespace vswarm {

enum class GridMode { Overtaking, Cruising };

/// Lane x row cell lattice translating at a constant speed along the road.
///
/// Row p covers the longitudinal band
///   [s0 + v_cell (t - t0) + (p - 1) l_cell, s0 + v_cell (t - t0) + p l_cell)
/// and column q is centred on lane_y[q - 1].
struct MovingGrid
{
  double t0 = 0.0;
  double s0 = 0.0;
  double v_cell = 0.0;
  int n_rows = 1;
  int n_cols = 1;
  double l_cell = 1.0;
  double w_cell = 1.0;
  std::vector<double> lane_y;

  /// Longitudinal position of the rear edge of row 1 at time t.
  double origin_at(double t) const { return s0 + v_cell * (t - t0); }
  bool in_bounds(CellIndex c) const
  {
    return c.row >= 1 && c.row <= n_rows && c.col >= 1 && c.col <= n_cols;
  }
  int cell_count() const { return n_rows * n_cols; }
};

struct GriddingInputs
{
  double t0 = 0.0;
  double tail_cav_s = 0.0;
  int lane_count = 3;
  double lane_width = 3.0;
  /// Lane centrelines, right to left. Empty means `lane_count` lanes of
  /// `lane_width` centred on the middle lane.
  std::vector<double> lane_y;
  int cav_count = 1;
  double front_hv_s = 0.0;
  double front_hv_v = 0.0;
  double cav_length = 5.0;
  double safety_distance = 5.0;
  /// Forces the cell length instead of cav_length + safety_distance.
  std::optional<double> cell_length;
  GridMode mode = GridMode::Overtaking;
  double cruise_speed = 20.0;
};

struct WorldPoint
{
  double t = 0.0;
  double s = 0.0;
  double y = 0.0;
};

/// Evenly spaced lane centres, right to left, centred on y = 0.
std::vector<double> centred_lanes(int lane_count, double lane_width);

double cell_length(const GriddingInputs& in);

MovingGrid build_grid(const GriddingInputs& in);

/// Column whose centreline is nearest to y, or nullopt when y is more than
/// half a cell width away from every lane.
std::optional<int> lane_of(const MovingGrid& grid, double y);

std::optional<CellIndex> try_world_to_cell(const MovingGrid& grid, double t, double s, double y);

/// Throws OutOfGridError when (s, y) lies outside the grid footprint at time t.
CellIndex world_to_cell(const MovingGrid& grid, double t, double s, double y);

/// Centre of `cell` after `k` behaviour steps of length dt_b.
WorldPoint cell_to_world(const MovingGrid& grid, int k, CellIndex cell, double dt_b);

}  // namespace vswarm

#endif  // VSWARM_GRID_HPP
