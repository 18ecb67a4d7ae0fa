#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "support/planner_oracle.hpp"
#include "vswarm/planner/plan_io.hpp"
#include "vswarm/planner/program.hpp"
#include "vswarm/planner/solver.hpp"
#include "vswarm/planner/validate.hpp"

using namespace vswarm;
using namespace vswarm::planner;

namespace {

MovingGrid column_grid(int rows, int cols)
{
  MovingGrid g;
  g.n_rows = rows;
  g.n_cols = cols;
  g.l_cell = 10.0;
  g.w_cell = 3.0;
  g.v_cell = 17.5;
  g.lane_y = centred_lanes(cols, 3.0);
  return g;
}

HvForecast empty_forecast(int n)
{
  HvForecast f;
  f.n_steps = n;
  return f;
}

HvTrack still_hv(int id, CellIndex c, int n)
{
  return {id, std::vector<std::optional<CellIndex>>(static_cast<std::size_t>(n), c)};
}

int count_family(const BinaryProgram& p, Family f)
{
  int n = 0;
  for (const auto& r : p.rows) n += r.family == f;
  return n;
}

}  // namespace

TEST(BuildProgram, SingleCavVariableCount)
{
  PlannerWeights w;
  w.l_index = 1;
  const auto p = build_program(column_grid(2, 1), {{1, 1}}, empty_forecast(2), w, 2);
  EXPECT_EQ(p.occupancy_var_count(), 6);
  EXPECT_EQ(p.var_count(), 9);
}

TEST(BuildProgram, SharedInitialCellIsAnError)
{
  EXPECT_THROW(build_program(column_grid(3, 2), {{1, 1}, {1, 1}}, empty_forecast(3), {}, 3), std::invalid_argument);
}

TEST(BuildProgram, ShortForecastAndBadLaneIndex)
{
  EXPECT_THROW(build_program(column_grid(3, 2), {{1, 1}}, empty_forecast(2), {}, 3), std::invalid_argument);
  PlannerWeights w;
  w.l_index = 4;
  EXPECT_THROW(build_program(column_grid(3, 3), {{1, 1}}, empty_forecast(3), w, 3), std::invalid_argument);
}

TEST(BuildProgram, NoHvsMeansNoHvRows)
{
  const auto p = build_program(column_grid(4, 3), {{1, 1}, {2, 2}}, empty_forecast(3), {}, 3);
  EXPECT_EQ(count_family(p, Family::HvExclusion), 0);
  EXPECT_EQ(count_family(p, Family::SpaceMakingLane), 0);
  EXPECT_EQ(count_family(p, Family::SpaceMakingBand), 0);
}

TEST(BuildProgram, LinearisedObjectiveMatchesQuadraticCost)
{
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const auto inst = oracle::random_instance(rng);
    const auto scene = oracle::scene_of(inst);
    const auto prog = build_program(scene);
    OccupancyPlan plan;
    plan.n_steps = inst.n_steps;
    std::uniform_int_distribution<int> row(1, inst.grid.n_rows), col(1, inst.grid.n_cols);
    for (int i = 0; i < scene.n_cav(); ++i) {
      std::vector<CellIndex> seq;
      for (int k = 0; k < inst.n_steps; ++k) seq.push_back({row(rng), col(rng)});
      plan.cells.push_back(seq);
    }
    const auto x = assignment_from_plan(prog, plan);
    EXPECT_NEAR(evaluate_objective(prog, x), plan_objective(scene, plan), 1e-9);
  }
}

TEST(BuildProgram, ValidatorAgreesWithProgramRows)
{
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const auto inst = oracle::random_instance(rng);
    const auto scene = oracle::scene_of(inst);
    const auto prog = build_program(scene);
    OccupancyPlan plan;
    plan.n_steps = inst.n_steps;
    std::uniform_int_distribution<int> step(-1, 1);
    for (int i = 0; i < scene.n_cav(); ++i) {
      std::vector<CellIndex> seq{inst.init[static_cast<std::size_t>(i)]};
      for (int k = 1; k < inst.n_steps; ++k) {
        auto c = seq.back();
        c.row = std::clamp(c.row + step(rng), 1, inst.grid.n_rows);
        c.col = std::clamp(c.col + step(rng), 1, inst.grid.n_cols);
        seq.push_back(c);
      }
      plan.cells.push_back(seq);
    }
    const bool rows_ok = !first_violated_row(prog, assignment_from_plan(prog, plan));
    EXPECT_EQ(rows_ok, validate_plan(scene, plan).empty()) << "trial " << trial;
  }
}

TEST(ComputeDelta, Cases)
{
  const auto g = column_grid(6, 3);
  auto f = empty_forecast(3);
  f.hvs.push_back(still_hv(0, {5, 2}, 3));
  f.front_hv = 0;
  EXPECT_EQ(compute_delta({{1, 2}, {2, 2}, {3, 2}}, f, g, 2), 1);
  EXPECT_EQ(compute_delta({{6, 2}, {6, 1}}, f, g, 2), 0);
  EXPECT_EQ(compute_delta({{1, 1}, {2, 3}}, f, g, 2), 0);
  f.front_hv.reset();
  EXPECT_THROW(compute_delta({{1, 2}}, f, g, 2), std::invalid_argument);
}

TEST(ComputeEpsilon, Cases)
{
  auto f = empty_forecast(4);
  f.hvs.push_back(still_hv(0, {3, 1}, 4));
  f.hvs.push_back(still_hv(1, {3, 3}, 4));
  const std::vector<CellIndex> cavs{{1, 2}, {2, 2}, {3, 2}};
  auto none = compute_epsilon(f, 1, cavs);
  EXPECT_EQ(none.epsilon, 0);
  EXPECT_TRUE(none.assignments.empty());

  f.detected_lane_events = {{1, 0, {3, 1}}, {1, 1, {3, 3}}};
  auto two = compute_epsilon(f, 1, cavs);
  EXPECT_EQ(two.epsilon, 1);
  ASSERT_EQ(two.assignments.size(), 2u);
  EXPECT_EQ(two.assignments[0].cav, 3);
  EXPECT_EQ(two.assignments[0].target_col, 3);
  EXPECT_EQ(two.assignments[1].cav, 2);
  EXPECT_EQ(two.assignments[1].target_col, 1);
}

TEST(ComputeEpsilon, SingleEventSingleCav)
{
  auto f = empty_forecast(2);
  f.hvs.push_back(still_hv(0, {2, 1}, 2));
  f.detected_lane_events = {{1, 0, {2, 1}}};
  auto r = compute_epsilon(f, 1, {{1, 2}});
  ASSERT_EQ(r.assignments.size(), 1u);
  EXPECT_EQ(r.assignments[0].cav, 1);
}

TEST(ComputeEpsilon, MoreEventsThanCavsThrows)
{
  auto f = empty_forecast(2);
  f.hvs.push_back(still_hv(0, {2, 1}, 2));
  f.hvs.push_back(still_hv(1, {2, 3}, 2));
  f.detected_lane_events = {{1, 0, {2, 1}}, {1, 1, {2, 3}}};
  EXPECT_THROW(compute_epsilon(f, 1, {{1, 2}}), std::invalid_argument);
}

TEST(Solve, SingleCavAdvancesToTheFront)
{
  PlannerWeights w;
  w.l_index = 1;
  const auto plan = solve(build_program(column_grid(3, 1), {{1, 1}}, empty_forecast(3), w, 3));
  EXPECT_EQ(plan.at(1, 1), (CellIndex{1, 1}));
  EXPECT_EQ(plan.at(1, 2), (CellIndex{2, 1}));
  EXPECT_EQ(plan.at(1, 3), (CellIndex{3, 1}));
}

TEST(Solve, CavAtTheFrontStays)
{
  PlannerWeights w;
  w.l_index = 1;
  const auto plan = solve(build_program(column_grid(3, 1), {{3, 1}}, empty_forecast(4), w, 4));
  for (int k = 1; k <= 4; ++k) EXPECT_EQ(plan.at(1, k), (CellIndex{3, 1}));
  EXPECT_DOUBLE_EQ(plan.objective_value, 0.0);
}

TEST(Solve, InfeasibleReportsFamily)
{
  // The blocking band runs from the HV row up to the CAV row, which is empty
  // when the HV is already ahead of the CAV.
  auto f = empty_forecast(3);
  f.hvs.push_back(still_hv(0, {3, 1}, 3));
  f.detected_lane_events = {{1, 0, {3, 1}}};
  PlannerWeights w;
  w.l_index = 2;
  try {
    solve(build_program(column_grid(3, 2), {{1, 2}}, f, w, 3));
    FAIL() << "expected an infeasible program";
  } catch (const InfeasibleError& e) {
    EXPECT_EQ(e.family(), Family::SpaceMakingBand);
  }
}

TEST(Solve, BudgetExhaustionIsReported)
{
  const auto prog = build_program(column_grid(8, 3), {{1, 1}, {1, 2}, {1, 3}, {2, 2}}, empty_forecast(8), {}, 8);
  SolveLimits tight;
  tight.max_nodes = 5;
  EXPECT_THROW(solve(prog, tight), BudgetExhaustedError);
}

TEST(Solve, MatchesEnumerationOnRandomTinyInstances)
{
  std::mt19937_64 rng(2024);
  int feasible = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const auto inst = oracle::random_instance(rng);
    const auto scene = oracle::scene_of(inst);
    const auto oracle = oracle::enumerate_optimum(scene);
    const auto prog = build_program(scene);
    if (!oracle.best) {
      EXPECT_THROW(solve(prog), InfeasibleError) << "trial " << trial;
      continue;
    }
    ++feasible;
    const auto plan = solve(prog);
    EXPECT_NEAR(plan.objective_value, *oracle.best, 1e-9) << "trial " << trial;
    EXPECT_TRUE(validate_plan(scene, plan).empty()) << "trial " << trial;
  }
  EXPECT_GT(feasible, 30);
}

TEST(Solve, MonotoneProgressForLoneCav)
{
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const int rows = 2 + static_cast<int>(rng() % 6);
    const int cols = 1 + static_cast<int>(rng() % 3);
    const int n = 2 + static_cast<int>(rng() % 6);
    PlannerWeights w;
    w.l_index = 1 + static_cast<int>(rng() % cols);
    const CellIndex start{1 + static_cast<int>(rng() % rows), 1 + static_cast<int>(rng() % cols)};
    const auto plan = solve(build_program(column_grid(rows, cols), {start}, empty_forecast(n), w, n));
    for (int k = 1; k < n; ++k) EXPECT_LE(plan.at(1, k).row, plan.at(1, k + 1).row);
  }
}

TEST(Solve, Deterministic)
{
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const auto inst = oracle::random_instance(rng, 2, 4, 3, 4);
    const auto prog = build_program(oracle::scene_of(inst));
    try {
      const auto a = solve(prog);
      const auto b = solve(prog);
      EXPECT_EQ(a.cells, b.cells);
      EXPECT_EQ(a.objective_value, b.objective_value);
    } catch (const InfeasibleError&) {
    }
  }
}

TEST(ValidatePlan, DiagonalMoveIsOneCornerwiseViolation)
{
  OccupancyPlan plan;
  plan.n_steps = 2;
  plan.cells = {{{1, 1}, {2, 2}}};
  const auto v = validate_plan(plan, column_grid(3, 3), empty_forecast(2), {{1, 1}});
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].family, Family::Cornerwise);
  EXPECT_EQ(v[0].cav, 1);
  EXPECT_EQ(v[0].step, 1);
  EXPECT_EQ(v[0].cell, (CellIndex{1, 1}));
}

TEST(ValidatePlan, HvCellIsOneExclusionViolation)
{
  auto f = empty_forecast(2);
  f.hvs.push_back(still_hv(0, {2, 1}, 2));
  OccupancyPlan plan;
  plan.n_steps = 2;
  plan.cells = {{{1, 1}, {2, 1}}};
  const auto v = validate_plan(plan, column_grid(3, 3), f, {{1, 1}});
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].family, Family::HvExclusion);
}

TEST(ShouldReplan, Cases)
{
  EXPECT_FALSE(should_replan(5, 14, false));
  EXPECT_TRUE(should_replan(14, 14, false));
  EXPECT_TRUE(should_replan(3, 14, true));
  EXPECT_THROW(should_replan(15, 14, false), std::invalid_argument);
}

TEST(PlanIo, JsonRoundTrip)
{
  OccupancyPlan plan;
  plan.n_steps = 3;
  plan.objective_value = 12.5;
  plan.cells = {{{1, 1}, {2, 1}, {3, 1}}, {{1, 2}, {1, 2}, {2, 2}}};
  const auto back = plan_from_json(plan_to_json(plan));
  EXPECT_EQ(back.cells, plan.cells);
  EXPECT_EQ(back.n_steps, 3);
  EXPECT_DOUBLE_EQ(back.objective_value, 12.5);
  std::ostringstream os;
  print_plan_table(os, plan);
  EXPECT_NE(os.str().find("(3,1)"), std::string::npos);
}
