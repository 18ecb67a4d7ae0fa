// Brute-force reference for tiny planning instances, plus a random
// instance generator shared by the unit and acceptance suites.
#ifndef VSWARM_TESTS_PLANNER_ORACLE_HPP
#define VSWARM_TESTS_PLANNER_ORACLE_HPP

#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "vswarm/planner/program.hpp"
#include "vswarm/planner/validate.hpp"

namespace vswarm::oracle {

struct TinyInstance
{
  MovingGrid grid;
  std::vector<CellIndex> init;
  planner::HvForecast forecast;
  planner::PlannerWeights weights;
  int n_steps = 2;
};

struct OracleResult
{
  std::optional<double> best;
  long feasible_count = 0;
};

inline bool single_cav_family(planner::Family f)
{
  using planner::Family;
  return f != Family::CavCollision && f != Family::SwapBan && f != Family::VacatedCellBan;
}

/// Enumerates every cell sequence of every CAV (start cell free too), keeps
/// the joint plans the direct checker accepts and returns the cheapest
/// quadratic cost. Exponential, meant for <= 2 CAVs, <= 12 cells, N <= 4.
inline OracleResult enumerate_optimum(const planner::PlanningScene& scene)
{
  const int n = scene.n_cav();
  const int N = scene.n_steps;
  const int cells = scene.n_rows * scene.n_cols;
  auto to_cell = [&](int c) { return CellIndex{c / scene.n_cols + 1, c % scene.n_cols + 1}; };

  long total = 1;
  for (int k = 0; k < N; ++k) total *= cells;

  // Per-CAV sequences that break no rule involving only that CAV.
  std::vector<std::vector<std::vector<CellIndex>>> options(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    planner::OccupancyPlan probe;
    probe.n_steps = N;
    for (int j = 0; j < n; ++j)
      probe.cells.push_back(std::vector<CellIndex>(static_cast<std::size_t>(N), scene.init_cells[static_cast<std::size_t>(j)]));
    for (long code = 0; code < total; ++code) {
      long rest = code;
      std::vector<CellIndex> seq(static_cast<std::size_t>(N));
      for (int k = 0; k < N; ++k) {
        seq[static_cast<std::size_t>(k)] = to_cell(static_cast<int>(rest % cells));
        rest /= cells;
      }
      probe.cells[static_cast<std::size_t>(i)] = seq;
      bool ok = true;
      for (const auto& v : planner::validate_plan(scene, probe))
        if (v.cav == i + 1 && single_cav_family(v.family)) {
          ok = false;
          break;
        }
      if (ok) options[static_cast<std::size_t>(i)].push_back(seq);
    }
  }

  OracleResult out;
  planner::OccupancyPlan plan;
  plan.n_steps = N;
  plan.cells.resize(static_cast<std::size_t>(n));
  std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
  for (const auto& o : options)
    if (o.empty()) return out;
  while (true) {
    for (int i = 0; i < n; ++i)
      plan.cells[static_cast<std::size_t>(i)] = options[static_cast<std::size_t>(i)][idx[static_cast<std::size_t>(i)]];
    if (planner::validate_plan(scene, plan).empty()) {
      ++out.feasible_count;
      const double cost = planner::plan_objective(scene, plan);
      if (!out.best || cost < *out.best) out.best = cost;
    }
    int i = 0;
    while (i < n && ++idx[static_cast<std::size_t>(i)] == options[static_cast<std::size_t>(i)].size()) {
      idx[static_cast<std::size_t>(i)] = 0;
      ++i;
    }
    if (i == n) break;
  }
  return out;
}

/// Random instance within the given size caps. HVs move at most one row
/// per step and may drift out of the grid; one HV may be the front HV and
/// HVs outside the platoon column may be reported as lane events at step 1.
inline TinyInstance random_instance(std::mt19937_64& rng, int max_cav = 2, int max_rows = 4, int max_cols = 3,
                                    int max_steps = 4)
{
  auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  TinyInstance t;
  const int n_cav = uni(1, max_cav);
  t.grid.n_rows = uni(std::max(2, n_cav), max_rows);
  t.grid.n_cols = uni(1, max_cols);
  t.grid.l_cell = 10.0;
  t.grid.w_cell = 3.0;
  t.grid.v_cell = 17.5;
  t.grid.lane_y = centred_lanes(t.grid.n_cols, 3.0);
  t.n_steps = uni(2, max_steps);

  std::vector<CellIndex> all;
  for (int p = 1; p <= t.grid.n_rows; ++p)
    for (int q = 1; q <= t.grid.n_cols; ++q) all.push_back({p, q});
  std::shuffle(all.begin(), all.end(), rng);
  t.init.assign(all.begin(), all.begin() + n_cav);

  t.weights.w_tar = uni(0, 20) * 0.5;
  t.weights.w_lon = uni(0, 6) * 0.5;
  t.weights.w_lat = uni(0, 6) * 0.5;
  t.weights.l_index = uni(1, t.grid.n_cols);

  const int n_hv = uni(0, 2);
  t.forecast.n_steps = t.n_steps;
  for (int j = 0; j < n_hv; ++j) {
    planner::HvTrack h;
    h.id = j;
    CellIndex c = all[static_cast<std::size_t>(n_cav + j) % all.size()];
    const int drift = uni(-1, 0);
    for (int k = 1; k <= t.n_steps; ++k) {
      const int row = c.row + drift * (k - 1);
      if (row >= 1)
        h.cells.push_back(CellIndex{row, c.col});
      else
        h.cells.push_back(std::nullopt);
    }
    t.forecast.hvs.push_back(h);
  }
  for (int j = 0; j < n_hv; ++j) {
    const auto c = *t.forecast.hvs[static_cast<std::size_t>(j)].cells[0];
    if (c.col == t.weights.l_index && !t.forecast.front_hv && uni(0, 1))
      t.forecast.front_hv = j;
    else if (c.col != t.weights.l_index && uni(0, 2) == 0 &&
             static_cast<int>(t.forecast.detected_lane_events.size()) < n_cav)
      t.forecast.detected_lane_events.push_back({1, j, c});
  }
  t.weights.delta = t.forecast.front_hv ? compute_delta(t.init, t.forecast, t.grid, t.weights.l_index) : uni(0, 1);
  return t;
}

inline planner::PlanningScene scene_of(const TinyInstance& t)
{
  return planner::make_scene(t.grid, t.init, t.forecast, t.weights, t.n_steps);
}

}  // namespace vswarm::oracle

#endif
