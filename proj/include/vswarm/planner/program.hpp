#ifndef VSWARM_PLANNER_PROGRAM_HPP
#define VSWARM_PLANNER_PROGRAM_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vswarm/common.hpp"
#include "vswarm/grid.hpp"

namespace vswarm::planner {

/// Predicted HV cells over the planning horizon. Steps are 1-based in the
/// public API; `cells[k - 1]` is the HV cell at step k, empty while the HV is
/// outside the grid.
struct HvTrack
{
  int id = 0;
  std::vector<std::optional<CellIndex>> cells;
};

/// An HV seen in a lane other than the platoon lane at step `k`.
struct LaneEvent
{
  int k = 1;
  int hv = 0;  ///< index into HvForecast::hvs
  CellIndex cell;
};

struct HvForecast
{
  int n_steps = 0;
  std::vector<HvTrack> hvs;
  std::vector<LaneEvent> detected_lane_events;
  /// Index into `hvs` of the slow vehicle being overtaken, if any.
  std::optional<int> front_hv;

  std::optional<CellIndex> cell(int hv, int k) const
  {
    return hvs[static_cast<std::size_t>(hv)].cells[static_cast<std::size_t>(k - 1)];
  }
};

struct PlannerWeights
{
  double w_tar = 10.0;
  double w_lon = 1.0;
  double w_lat = 2.0;
  int l_index = 2;
  int delta = 1;
};

/// A CAV told to move into an HV's lane ahead of it at step k + 1.
struct BlockingAssignment
{
  int k = 1;
  int cav = 1;         ///< 1-based CAV number
  int hv = 0;          ///< index into HvForecast::hvs
  int target_col = 1;  ///< the detected HV's column
  int row_lo = 1;      ///< detected HV row at step k
  int row_hi = 1;      ///< blocking CAV row at episode start
};

struct EpsilonResult
{
  int epsilon = 0;
  std::vector<BlockingAssignment> assignments;
};

enum class VarRole { Row, Col, RowMove, ColMove, Regroup };

/// What a program variable stands for. For Row/Col: CAV `cav` occupies row or
/// column `index` at step `step`. For RowMove/ColMove: |x(step + 1) - x(step)|
/// of that row/column indicator. For Regroup: CAV has passed the front HV and
/// sits in column `index` at `step`.
struct VarMeta
{
  VarRole role = VarRole::Row;
  int cav = 1;
  int step = 1;
  int index = 1;
};

enum class Sense { LessEqual, Equal };

enum class Family {
  Occupancy,        ///< one row and one column per CAV and step
  RowTransition,    ///< no jumps across non-adjacent rows
  ColTransition,    ///< no jumps across non-adjacent columns
  Cornerwise,       ///< no diagonal moves
  CavCollision,     ///< two CAVs never share a cell
  HvExclusion,      ///< CAVs never enter a forecast HV cell
  SpaceMakingLane,  ///< blocking CAV moves into the detected HV's lane
  SpaceMakingBand,  ///< blocking CAV stays between the HV and its own row
  InitialCondition,
  SwapBan,          ///< two CAVs never exchange adjacent cells
  VacatedCellBan,   ///< no entering a cell another CAV is leaving sideways
  AuxLink,          ///< lower bounds defining the linearisation auxiliaries
};

std::string_view to_string(Family f);

struct Term
{
  int var = 0;
  double coef = 0.0;
};

struct Constraint
{
  std::vector<Term> terms;
  Sense sense = Sense::LessEqual;
  double rhs = 0.0;
  Family family = Family::Occupancy;
};

/// Linear 0-1 program over occupancy indicators plus auxiliaries.
///
/// Auxiliary variables appear with coefficient -1 only in AuxLink rows of the
/// form sum(a x) - z <= b and carry a non-negative objective weight, so at any
/// optimum z = max(0, max over its rows of sum(a x) - b).
struct BinaryProgram
{
  int n_cav = 0;
  int n_steps = 0;
  int n_rows = 0;
  int n_cols = 0;
  std::vector<VarMeta> vars;
  std::vector<double> objective;
  double objective_constant = 0.0;
  std::vector<Constraint> rows;

  int var_count() const { return static_cast<int>(vars.size()); }
  int row_var(int cav, int k, int p) const;
  int col_var(int cav, int k, int q) const;
  int occupancy_var_count() const { return n_cav * n_steps * (n_rows + n_cols); }
};

/// Cells of every CAV at every step: cells[i - 1][k - 1].
struct OccupancyPlan
{
  int n_steps = 0;
  std::vector<std::vector<CellIndex>> cells;
  double objective_value = 0.0;

  CellIndex at(int cav, int k) const
  {
    return cells[static_cast<std::size_t>(cav - 1)][static_cast<std::size_t>(k - 1)];
  }
  int n_cav() const { return static_cast<int>(cells.size()); }
};

/// Everything the planner needs for one episode, bundled so the program,
/// validator and objective evaluator agree on a single view of the scene.
struct PlanningScene
{
  int n_rows = 1;
  int n_cols = 1;
  int n_steps = 2;
  std::vector<CellIndex> init_cells;
  HvForecast forecast;
  PlannerWeights weights;
  std::vector<BlockingAssignment> blocking;

  int n_cav() const { return static_cast<int>(init_cells.size()); }
  /// Row of the front HV at step k, or 0 when there is none in the grid.
  int front_row(int k) const;
};

/// 1 iff some CAV sits in the front HV's column at or behind its row at the
/// episode start. Throws when the forecast has no front HV.
int compute_delta(const std::vector<CellIndex>& init_cells, const HvForecast& forecast,
                  const MovingGrid& grid, int l_index);

/// Detection flag and blocking assignments for step k. Detected HVs are
/// served foremost-first (ties broken leftmost-first) by the foremost
/// unassigned CAVs.
EpsilonResult compute_epsilon(const HvForecast& forecast, int k, const std::vector<CellIndex>& init_cells);

/// Validates inputs and gathers blocking assignments for every step.
PlanningScene make_scene(const MovingGrid& grid, const std::vector<CellIndex>& init_cells,
                         const HvForecast& forecast, const PlannerWeights& weights, int n_steps);

BinaryProgram build_program(const PlanningScene& scene);

BinaryProgram build_program(const MovingGrid& grid, const std::vector<CellIndex>& init_cells,
                            const HvForecast& forecast, const PlannerWeights& weights, int n_steps);

/// The planning cost of a decoded plan, evaluated term by term from the
/// quadratic form (no auxiliaries involved).
double plan_objective(const PlanningScene& scene, const OccupancyPlan& plan);

/// Objective of a full variable assignment; auxiliaries are read from `x`.
double evaluate_objective(const BinaryProgram& program, const std::vector<double>& x);

/// Fills occupancy indicators from a plan and sets every auxiliary to the
/// smallest value its AuxLink rows allow.
std::vector<double> assignment_from_plan(const BinaryProgram& program, const OccupancyPlan& plan);

/// Index of the first violated row, if any (tolerance 1e-9).
std::optional<int> first_violated_row(const BinaryProgram& program, const std::vector<double>& x);

/// Replanning trigger: the previous plan is used up or a new HV entered the grid.
bool should_replan(int executed_steps, int plan_len, bool new_hv_entered);

/// Plain-text listing of the program in an LP-like layout.
void write_lp(std::ostream& os, const BinaryProgram& program);

std::string var_name(const VarMeta& m);

}  // namespace vswarm::planner

#endif  // VSWARM_PLANNER_PROGRAM_HPP
