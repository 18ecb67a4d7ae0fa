#include <gtest/gtest.h>

#include <cmath>

#include "vswarm/traffic.hpp"

namespace vswarm {
namespace {

VehicleState hv(double s, double v, double y = 0.0)
{
  VehicleState h;
  h.id = "hv";
  h.s = s;
  h.v = v;
  h.y = y;
  return h;
}

MovingGrid grid10(double v_cell = 17.5)
{
  GriddingInputs in;
  in.cav_count = 3;
  in.front_hv_s = 100.0;
  in.front_hv_v = v_cell;
  in.cell_length = 10.0;
  return build_grid(in);
}

TEST(Idm, FreeRoadLimits)
{
  const IdmParams p;
  EXPECT_DOUBLE_EQ(idm_accel(hv(0, p.v0), std::nullopt, p), 0.0);
  EXPECT_DOUBLE_EQ(idm_accel(hv(0, 0.0), std::nullopt, p), p.a_max);
}

TEST(Idm, EquilibriumGapGivesZeroAcceleration)
{
  // With the default v0 = 17.5 the equilibrium gap at 17.5 m/s is infinite,
  // so the identity is checked at a higher desired speed.
  IdmParams p;
  p.v0 = 30.0;
  const double gap = idm_equilibrium_gap(17.5, p);
  EXPECT_NEAR(idm_accel(hv(0, 17.5), hv(gap + p.vehicle_length, 17.5), p), 0.0, 1e-9);
  EXPECT_THROW(idm_equilibrium_gap(17.5, IdmParams{}), std::domain_error);
}

TEST(Idm, NonPositiveGapBrakesFully)
{
  const IdmParams p;
  EXPECT_EQ(idm_accel(hv(0, 10), hv(4.0, 10), p), p.accel_min);
  EXPECT_EQ(idm_accel(hv(0, 10), hv(5.0, 10), p), p.accel_min);
}

TEST(Idm, MonotoneInSpeedAndGap)
{
  const IdmParams p;
  const auto lead = hv(40, 15);
  double prev = idm_accel(hv(0, 0.0), lead, p);
  for (double v = 0.5; v <= 30.0; v += 0.5) {
    const double a = idm_accel(hv(0, v), lead, p);
    EXPECT_LE(a, prev);
    prev = a;
  }
  prev = idm_accel(hv(0, 15), hv(5.5, 15), p);
  for (double s = 6.0; s <= 200.0; s += 0.5) {
    const double a = idm_accel(hv(0, 15), hv(s, 15), p);
    EXPECT_GE(a, prev);
    prev = a;
  }
}

TEST(Idm, RejectsBadParameters)
{
  IdmParams p;
  p.delta_exp = 0.5;
  EXPECT_THROW(validate(p), std::invalid_argument);
  p = IdmParams{};
  p.T = 0.0;
  EXPECT_THROW(validate(p), std::invalid_argument);
}

TEST(StepHv, UniformMotion)
{
  const auto n = step_hv(hv(10, 17.5, 3.0), 0.0, 0.03);
  EXPECT_DOUBLE_EQ(n.s, 10 + 17.5 * 0.03);
  EXPECT_DOUBLE_EQ(n.v, 17.5);
  EXPECT_DOUBLE_EQ(n.y, 3.0);
}

TEST(StepHv, SpeedFlooredAtZero)
{
  const auto n = step_hv(hv(0, 1.0), -4.0, 0.5);
  EXPECT_DOUBLE_EQ(n.v, 0.0);
  EXPECT_DOUBLE_EQ(n.s, 0.25);
  EXPECT_THROW(step_hv(hv(0, 1.0), 0.0, 0.0), std::invalid_argument);
}

TEST(Forecast, CoMovingVehicleKeepsItsCell)
{
  const auto g = grid10();
  const auto f = forecast_cells({hv(35, 17.5, 3.0)}, g, 6, 3.0);
  ASSERT_EQ(f.hvs.size(), 1u);
  for (const auto& c : f.hvs[0].cells) EXPECT_EQ(c, (CellIndex{4, 3}));
}

TEST(Forecast, SlowerVehicleDriftsBack)
{
  const auto g = grid10();
  const auto f = forecast_cells({hv(60.5, 15.0, 0.0)}, g, 4, 3.0);
  const auto& c = f.hvs[0].cells;
  EXPECT_EQ(c[0]->row, 7);
  EXPECT_EQ(c[1]->row, 6);
  EXPECT_EQ(c[2]->row, 5);
  EXPECT_EQ(c[3]->row, 4);
}

TEST(Forecast, VehicleLeavesGrid)
{
  const auto g = grid10();
  const auto f = forecast_cells({hv(5, 10.0, 0.0)}, g, 3, 3.0);
  EXPECT_TRUE(f.hvs[0].cells[0].has_value());
  EXPECT_FALSE(f.hvs[0].cells[1].has_value());
}

TEST(Forecast, VehicleOutsideLanesRejected)
{
  EXPECT_THROW(forecast_cells({hv(30, 17.5, 7.0)}, grid10(), 3, 3.0), std::invalid_argument);
}

TEST(Forecast, SingleStepIsCurrentCell)
{
  const auto g = grid10();
  const std::vector<VehicleState> hvs{hv(12, 3.0, -3.0), hv(77, 30.0, 0.0), hv(99, 17.5, 3.0)};
  const auto f = forecast_cells(hvs, g, 1, 3.0);
  for (std::size_t j = 0; j < hvs.size(); ++j) EXPECT_EQ(f.hvs[j].cells[0], try_world_to_cell(g, 0.0, hvs[j].s, hvs[j].y));
}

TEST(Forecast, LaneEventsTakeForemostSideVehicle)
{
  const auto g = grid10();
  const std::vector<VehicleState> hvs{hv(100, 17.5, 0.0), hv(35, 17.5, -3.0), hv(15, 17.5, -3.0), hv(25, 17.5, 3.0)};
  ForecastOptions o;
  o.front_hv = 0;
  o.detect_lane_events = true;
  const auto f = forecast_cells(hvs, g, 3, 3.0, o);
  ASSERT_EQ(f.detected_lane_events.size(), 2u);
  EXPECT_EQ(f.detected_lane_events[0].hv, 1);
  EXPECT_EQ(f.detected_lane_events[0].cell, (CellIndex{4, 1}));
  EXPECT_EQ(f.detected_lane_events[1].hv, 3);
  EXPECT_EQ(f.front_hv, 0);
  EXPECT_TRUE(forecast_cells(hvs, g, 3, 3.0).detected_lane_events.empty());
}

TEST(IdmStream, NoCollisionsOverTwoMinutes)
{
  const IdmParams p;
  std::vector<VehicleState> lane;
  for (int i = 0; i < 6; ++i) lane.push_back(hv(-25.0 * i, 17.5));
  double min_gap = 1e9;
  for (int tick = 0; tick < 4000; ++tick) {
    std::vector<VehicleState> next;
    for (std::size_t i = 0; i < lane.size(); ++i) {
      const auto leader = i == 0 ? std::optional<VehicleState>{} : std::optional<VehicleState>{lane[i - 1]};
      next.push_back(step_hv(lane[i], idm_accel(lane[i], leader, p), 0.03));
    }
    lane = next;
    for (std::size_t i = 1; i < lane.size(); ++i) min_gap = std::min(min_gap, lane[i - 1].s - lane[i].s - 5.0);
  }
  EXPECT_GT(min_gap, p.s0_jam);
}

}  // namespace
}  // namespace vswarm
