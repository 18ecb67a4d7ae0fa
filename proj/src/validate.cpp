#include "vswarm/planner/validate.hpp"

#include <cstdlib>
#include <sstream>

namespace vswarm::planner {

std::string describe(const Violation& v)
{
  std::ostringstream os;
  os << to_string(v.family) << ": cav " << v.cav << " step " << v.step << " cell (" << v.cell.row << ','
     << v.cell.col << ')';
  if (v.other >= 0) os << " other " << v.other;
  if (!v.detail.empty()) os << " - " << v.detail;
  return os.str();
}

std::vector<Violation> validate_plan(const PlanningScene& scene, const OccupancyPlan& plan)
{
  std::vector<Violation> out;
  const int n = scene.n_cav();
  const int N = scene.n_steps;
  auto add = [&](Family f, int i, int k, CellIndex c, int other, std::string detail) {
    out.push_back({f, i, k, other, c, std::move(detail)});
  };

  if (plan.n_cav() != n || plan.n_steps != N) {
    add(Family::Occupancy, 0, 0, {}, -1, "plan shape does not match the scene");
    return out;
  }
  for (int i = 1; i <= n; ++i)
    if (static_cast<int>(plan.cells[static_cast<std::size_t>(i - 1)].size()) != N) {
      add(Family::Occupancy, i, 0, {}, -1, "wrong number of steps");
      return out;
    }

  bool in_grid = true;
  for (int i = 1; i <= n; ++i)
    for (int k = 1; k <= N; ++k) {
      const auto c = plan.at(i, k);
      if (c.row < 1 || c.row > scene.n_rows || c.col < 1 || c.col > scene.n_cols) {
        add(Family::Occupancy, i, k, c, -1, "cell outside the grid");
        in_grid = false;
      }
    }
  if (!in_grid) return out;

  for (int i = 1; i <= n; ++i) {
    const auto c = plan.at(i, 1);
    if (c != scene.init_cells[static_cast<std::size_t>(i - 1)]) add(Family::InitialCondition, i, 1, c, -1, "");
  }

  for (int i = 1; i <= n; ++i)
    for (int k = 1; k < N; ++k) {
      const auto a = plan.at(i, k);
      const auto b = plan.at(i, k + 1);
      if (std::abs(b.row - a.row) >= 2) add(Family::RowTransition, i, k, a, -1, "row jump");
      if (std::abs(b.col - a.col) >= 2) add(Family::ColTransition, i, k, a, -1, "column jump");
      if (b.row != a.row && b.col != a.col && std::abs(b.row - a.row) == 1 && std::abs(b.col - a.col) == 1)
        add(Family::Cornerwise, i, k, a, -1, "diagonal move");
    }

  for (int k = 2; k <= N; ++k)
    for (int i1 = 1; i1 <= n; ++i1)
      for (int i2 = i1 + 1; i2 <= n; ++i2)
        if (plan.at(i1, k) == plan.at(i2, k)) add(Family::CavCollision, i1, k, plan.at(i1, k), i2, "");

  const auto& f = scene.forecast;
  for (int k = 2; k <= N; ++k)
    for (int j = 0; j < static_cast<int>(f.hvs.size()); ++j) {
      const auto hv = f.cell(j, k);
      if (!hv) continue;
      for (int i = 1; i <= n; ++i)
        if (plan.at(i, k) == *hv) add(Family::HvExclusion, i, k, *hv, j, "");
    }

  for (const auto& a : scene.blocking) {
    if (a.k + 1 > N) continue;
    const auto now = plan.at(a.cav, a.k);
    const auto next = plan.at(a.cav, a.k + 1);
    if (next.col != a.target_col) add(Family::SpaceMakingLane, a.cav, a.k + 1, next, a.hv, "not in the HV's lane");
    const int hi = a.k == 1 ? a.row_hi : now.row;
    if (next.row < a.row_lo || next.row > hi)
      add(Family::SpaceMakingBand, a.cav, a.k + 1, next, a.hv, "outside the blocking band");
  }

  for (int k = 1; k < N; ++k)
    for (int i1 = 1; i1 <= n; ++i1)
      for (int i2 = 1; i2 <= n; ++i2) {
        if (i1 == i2) continue;
        const auto a0 = plan.at(i1, k);
        const auto a1 = plan.at(i1, k + 1);
        const auto b0 = plan.at(i2, k);
        const auto b1 = plan.at(i2, k + 1);
        if (b1 == a0 && (a1.col != a0.col || b0.col != a0.col))
          add(Family::VacatedCellBan, i2, k + 1, b1, i1, "entered a cell being vacated sideways");
        if (a0.col == b0.col && b0.row == a0.row + 1 && a1.row == a0.row + 1 && b1.row == a0.row)
          add(Family::SwapBan, i1, k, a0, i2, "longitudinal swap");
      }
  return out;
}

std::vector<Violation> validate_plan(const OccupancyPlan& plan, const MovingGrid& grid, const HvForecast& forecast,
                                     const std::vector<CellIndex>& init_cells)
{
  PlanningScene scene;
  scene.n_rows = grid.n_rows;
  scene.n_cols = grid.n_cols;
  scene.n_steps = plan.n_steps;
  scene.init_cells = init_cells;
  scene.forecast = forecast;
  for (int k = 1; k < plan.n_steps && k <= forecast.n_steps; ++k) {
    auto eps = compute_epsilon(forecast, k, init_cells);
    for (auto& a : eps.assignments) scene.blocking.push_back(a);
  }
  return validate_plan(scene, plan);
}

}  // namespace vswarm::planner
