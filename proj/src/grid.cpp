#include "vswarm/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace vswarm {

std::vector<double> centred_lanes(int lane_count, double lane_width)
{
  std::vector<double> y(static_cast<std::size_t>(lane_count));
  const double mid = 0.5 * (lane_count - 1);
  for (int q = 0; q < lane_count; ++q) y[static_cast<std::size_t>(q)] = (q - mid) * lane_width;
  return y;
}

double cell_length(const GriddingInputs& in)
{
  return in.cell_length ? *in.cell_length : in.cav_length + in.safety_distance;
}

MovingGrid build_grid(const GriddingInputs& in)
{
  if (in.lane_count < 1) throw std::invalid_argument("build_grid: lane count must be positive");
  if (in.cav_count < 1) throw std::invalid_argument("build_grid: at least one CAV is required");
  if (in.lane_width <= 0.0) throw std::invalid_argument("build_grid: lane width must be positive");
  const double l_cell = cell_length(in);
  if (!(l_cell > 0.0)) throw std::invalid_argument("build_grid: cell length must be positive");

  MovingGrid g;
  g.t0 = in.t0;
  g.s0 = in.tail_cav_s;
  g.n_cols = in.lane_count;
  g.l_cell = l_cell;
  g.w_cell = in.lane_width;
  g.lane_y = in.lane_y.empty() ? centred_lanes(in.lane_count, in.lane_width) : in.lane_y;
  if (static_cast<int>(g.lane_y.size()) != g.n_cols)
    throw std::invalid_argument("build_grid: lane_y must have one entry per lane");
  for (std::size_t q = 1; q < g.lane_y.size(); ++q)
    if (!(g.lane_y[q] > g.lane_y[q - 1]))
      throw std::invalid_argument("build_grid: lane centres must be strictly increasing");

  if (in.mode == GridMode::Overtaking) {
    const double gap = in.front_hv_s - in.tail_cav_s;
    if (!(gap > 0.0)) throw std::invalid_argument("build_grid: front HV must be ahead of the tail CAV");
    if (in.front_hv_v < 0.0) throw std::invalid_argument("build_grid: negative grid speed");
    g.n_rows = in.cav_count + static_cast<int>(std::ceil(gap / l_cell));
    g.v_cell = in.front_hv_v;
  } else {
    if (in.cruise_speed < 0.0) throw std::invalid_argument("build_grid: negative grid speed");
    g.n_rows = in.cav_count;
    g.v_cell = in.cruise_speed;
  }
  return g;
}

std::optional<int> lane_of(const MovingGrid& grid, double y)
{
  int best = -1;
  double best_d = 0.0;
  for (int q = 0; q < grid.n_cols; ++q) {
    const double d = std::abs(y - grid.lane_y[static_cast<std::size_t>(q)]);
    if (best < 0 || d < best_d) {
      best = q;
      best_d = d;
    }
  }
  if (best < 0 || best_d > 0.5 * grid.w_cell) return std::nullopt;
  return best + 1;
}

std::optional<CellIndex> try_world_to_cell(const MovingGrid& grid, double t, double s, double y)
{
  const double rel = (s - grid.origin_at(t)) / grid.l_cell;
  if (!(rel >= 0.0) || rel >= grid.n_rows) return std::nullopt;
  const auto col = lane_of(grid, y);
  if (!col) return std::nullopt;
  return CellIndex{static_cast<int>(std::floor(rel)) + 1, *col};
}

CellIndex world_to_cell(const MovingGrid& grid, double t, double s, double y)
{
  if (auto c = try_world_to_cell(grid, t, s, y)) return *c;
  throw OutOfGridError("position (s=" + std::to_string(s) + ", y=" + std::to_string(y) + ") at t=" +
                       std::to_string(t) + " lies outside the grid");
}

WorldPoint cell_to_world(const MovingGrid& grid, int k, CellIndex cell, double dt_b)
{
  if (!grid.in_bounds(cell)) throw std::out_of_range("cell_to_world: cell outside the grid");
  if (k < 0) throw std::invalid_argument("cell_to_world: negative step");
  const double dt = k * dt_b;
  return {grid.t0 + dt,
          grid.s0 + grid.v_cell * dt + 0.5 * grid.l_cell + (cell.row - 1) * grid.l_cell,
          grid.lane_y[static_cast<std::size_t>(cell.col - 1)]};
}

}  // namespace vswarm
