#include "vswarm/sim/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>

#include "vswarm/planner/validate.hpp"
#include "vswarm/tracker/tracking.hpp"
#include "vswarm/trajgen.hpp"

namespace vswarm::sim {

namespace {

int nearest_lane(const std::vector<double>& lane_y, double y)
{
  std::size_t best = 0;
  for (std::size_t i = 1; i < lane_y.size(); ++i)
    if (std::abs(y - lane_y[i]) < std::abs(y - lane_y[best])) best = i;
  return static_cast<int>(best) + 1;
}

bool overlaps(const VehicleState& a, const VehicleState& b, const Road& road)
{
  return std::abs(a.s - b.s) < road.vehicle_length && std::abs(a.y - b.y) < road.vehicle_width;
}

std::string cell_text(CellIndex c) { return "(" + std::to_string(c.row) + "," + std::to_string(c.col) + ")"; }

// Nearest body ahead whose footprint reaches into the band |dy| < half_band.
std::optional<std::size_t> leader_of(const World& w, std::size_t ego, double half_band)
{
  const auto& e = w.bodies[ego].state;
  std::optional<std::size_t> best;
  for (std::size_t j = 0; j < w.bodies.size(); ++j) {
    if (j == ego) continue;
    const auto& o = w.bodies[j].state;
    if (o.s <= e.s || std::abs(o.y - e.y) >= half_band) continue;
    if (!best || o.s < w.bodies[*best].state.s) best = j;
  }
  return best;
}

struct CavTrack
{
  ReferencePath ref;
  tracker::LqrSolution2 lon;
  tracker::LqrSolution2 lat;
  int tick0 = 0;
  double sigma0 = 0.0;
};

class Loop
{
public:
  Loop(const ScenarioConfig& cfg, Controller controller) : cfg_(cfg), controller_(controller), road_(road_of(cfg))
  {
    log_.controller = controller;
    log_.dt = cfg.lon.dt;
    world_ = initial_world(cfg, controller, &log_.vehicles);
    for (std::size_t i = 0; i < log_.vehicles.size(); ++i) {
      if (log_.vehicles[i].kind == VehicleKind::Cav) {
        ++n_cav_;
        continue;
      }
      IdmParams p = cfg.idm;
      // Stream leads and the slow front vehicle hold their configured speed.
      if (log_.vehicles[i].stream_index == 1) p.v0 = std::max(world_.bodies[i].state.v, 0.1);
      idm_.push_back(p);
    }
  }

  SimLog run()
  {
    record();
    const int tps = cfg_.ticks_per_step();
    const int total = cfg_.tick_count();
    try {
      if (controller_ == Controller::Swarming) replan("start");
      for (int tick = 0; tick < total; ++tick) {
        if (controller_ == Controller::Swarming && tick > 0 && tick % tps == 0) maybe_replan();
        std::vector<Command> cmds(world_.bodies.size());
        for (std::size_t i = 0; i < world_.bodies.size(); ++i)
          cmds[i] = i < n_cav_ ? cav_command(i) : hv_command(i);
        auto r = step_tick(world_, cmds, road_, cfg_.lon.dt);
        world_ = std::move(r.world);
        record();
        if (!r.collisions.empty()) {
          log_.collisions = r.collisions;
          const auto& c = r.collisions.front();
          throw SimulationError("collision between " + c.a + " and " + c.b + " at t=" + std::to_string(c.t));
        }
      }
    } catch (const SimulationError& e) {
      log_.aborted = true;
      log_.abort_reason = e.what();
    }
    return std::move(log_);
  }

  EpisodeRecord plan_episode(const std::string& trigger) const
  {
    const auto& wts = cfg_.weights;
    const double l = cfg_.cell_length.value_or(cfg_.vehicle_length + cfg_.safety_distance);
    const double lane_y = road_.lane_y[static_cast<std::size_t>(wts.l_index - 1)];
    double tail = 1e300, lead = -1e300;
    for (std::size_t i = 0; i < n_cav_; ++i) {
      tail = std::min(tail, world_.bodies[i].state.s);
      lead = std::max(lead, world_.bodies[i].state.s);
    }

    std::vector<VehicleState> hvs;
    std::vector<std::string> hv_ids;
    std::optional<std::size_t> front;
    for (std::size_t j = n_cav_; j < world_.bodies.size(); ++j) {
      const auto& h = world_.bodies[j].state;
      const bool slow_ahead = std::abs(h.y - lane_y) < 0.5 * cfg_.lane_width && h.s > tail &&
                              h.s - tail <= cfg_.detection_range && h.v < cfg_.cruise_speed - 0.5;
      if (slow_ahead && (!front || h.s < hvs[*front].s)) front = hvs.size();
      hvs.push_back(h);
      hv_ids.push_back(h.id);
    }

    GriddingInputs in;
    in.t0 = world_.t;
    in.tail_cav_s = tail - 0.5 * l;
    in.lane_count = cfg_.lane_count;
    in.lane_width = cfg_.lane_width;
    in.cav_count = static_cast<int>(n_cav_);
    in.cav_length = cfg_.vehicle_length;
    in.safety_distance = cfg_.safety_distance;
    in.cell_length = cfg_.cell_length;
    in.cruise_speed = cfg_.cruise_speed;
    if (front) {
      in.mode = GridMode::Overtaking;
      in.front_hv_s = hvs[*front].s;
      in.front_hv_v = hvs[*front].v;
    } else {
      in.mode = GridMode::Cruising;
    }
    MovingGrid grid = build_grid(in);
    // Cover CAVs that are spread out beyond the nominal grid.
    grid.n_rows = std::max(grid.n_rows, static_cast<int>(std::floor((lead - grid.s0) / grid.l_cell)) + 1);

    EpisodeRecord ep;
    ep.index = static_cast<int>(log_.episodes.size());
    ep.tick = world_.tick;
    ep.t = world_.t;
    ep.trigger = trigger;
    ep.mode = in.mode;
    ep.grid = grid;
    ep.hv_ids = hv_ids;
    for (std::size_t i = 0; i < n_cav_; ++i) {
      const auto& c = world_.bodies[i].state;
      try {
        ep.init_cells.push_back(world_to_cell(grid, world_.t, c.s, c.y));
      } catch (const OutOfGridError& e) {
        throw SimulationError(c.id + " is outside the planning grid: " + e.what());
      }
    }
    for (std::size_t a = 0; a < n_cav_; ++a)
      for (std::size_t b = a + 1; b < n_cav_; ++b)
        if (ep.init_cells[a] == ep.init_cells[b])
          throw SimulationError(log_.vehicles[a].id + " and " + log_.vehicles[b].id + " share cell " +
                                cell_text(ep.init_cells[a]));

    ForecastOptions opt;
    opt.platoon_col = wts.l_index;
    opt.front_hv = front;
    opt.detect_lane_events = front.has_value();
    ep.forecast = forecast_cells(hvs, grid, cfg_.horizon, cfg_.dt_b, opt);
    if (front) drop_unservable_events(ep);

    planner::PlannerWeights w = wts;
    w.delta = front ? planner::compute_delta(ep.init_cells, ep.forecast, grid, wts.l_index) : 0;
    ep.delta = w.delta;
    const auto scene = planner::make_scene(grid, ep.init_cells, ep.forecast, w, cfg_.horizon);
    ep.blocking = scene.blocking;
    try {
      ep.plan = planner::solve(planner::build_program(scene), cfg_.solve_limits, &ep.stats);
    } catch (const planner::InfeasibleError& e) {
      throw SimulationError("planner infeasible at t=" + std::to_string(world_.t) + " (" +
                            std::string(planner::to_string(e.family())) + "): " + e.what());
    } catch (const planner::BudgetExhaustedError& e) {
      throw SimulationError("planner budget exhausted at t=" + std::to_string(world_.t) + ": " + e.what());
    }
    ep.violations = static_cast<int>(planner::validate_plan(scene, ep.plan).size());
    return ep;
  }

private:
  // A lane event can only be served by a CAV at or ahead of the detected HV
  // that has not yet passed the front HV; drop the rest, foremost first.
  void drop_unservable_events(EpisodeRecord& ep) const
  {
    auto events = ep.forecast.detected_lane_events;
    std::stable_sort(events.begin(), events.end(), [](const planner::LaneEvent& a, const planner::LaneEvent& b) {
      return a.cell.row != b.cell.row ? a.cell.row > b.cell.row : a.cell.col > b.cell.col;
    });
    std::vector<std::size_t> order(n_cav_);
    for (std::size_t i = 0; i < n_cav_; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return ep.init_cells[a].row > ep.init_cells[b].row; });
    const auto front_cell = ep.forecast.cell(*ep.forecast.front_hv, 1);
    const int front_row = front_cell ? front_cell->row : ep.grid.n_rows + 1;
    std::vector<planner::LaneEvent> kept;
    std::size_t next = 0;
    while (next < n_cav_ && ep.init_cells[order[next]].row >= front_row) ++next;
    for (const auto& e : events) {
      if (next >= n_cav_) break;
      if (e.cell.row <= ep.init_cells[order[next]].row) {
        kept.push_back(e);
        ++next;
      }
    }
    ep.forecast.detected_lane_events = kept;
  }

  void replan(const std::string& trigger)
  {
    auto ep = plan_episode(trigger);
    tracks_.clear();
    const int tps = cfg_.ticks_per_step();
    for (std::size_t i = 0; i < n_cav_; ++i) {
      const auto& c = world_.bodies[i];
      CavTrack tr;
      tr.ref = build_reference_path(generate_waypoints(ep.plan.cells[i], ep.grid, cfg_.dt_b), cfg_.lat.ds);
      tr.tick0 = world_.tick;
      const auto lon = tracker::build_lon_problem({c.state.s, c.state.v}, tr.ref, world_.t, cfg_.lon,
                                                  std::max(1, cfg_.horizon * tps));
      tr.lon = tracker::lqr_solve(lon);
      tr.sigma0 = tr.ref.sigma_at(c.state.s);
      const double remaining = std::max(0.0, tr.ref.samples().back().sigma - tr.sigma0);
      const int K = static_cast<int>(std::ceil((remaining + 300.0) / cfg_.lat.ds));
      const auto lat = tracker::build_lat_problem(lateral_state(c, tr.ref), tr.ref, tr.sigma0, cfg_.lat, K);
      tr.lat = tracker::lqr_solve(lat);
      tracks_.push_back(std::move(tr));
    }
    in_grid_.clear();
    for (std::size_t j = n_cav_; j < world_.bodies.size(); ++j) {
      const auto& h = world_.bodies[j].state;
      if (try_world_to_cell(ep.grid, world_.t, h.s, h.y)) in_grid_.insert(h.id);
    }
    log_.episodes.push_back(std::move(ep));
  }

  void maybe_replan()
  {
    const auto& ep = log_.episodes.back();
    const int executed = (world_.tick - ep.tick) / cfg_.ticks_per_step();
    const int plan_len = ep.plan.n_steps - 1;
    bool entered = false;
    for (std::size_t j = n_cav_; j < world_.bodies.size(); ++j) {
      const auto& h = world_.bodies[j].state;
      if (!in_grid_.count(h.id) && try_world_to_cell(ep.grid, world_.t, h.s, h.y)) entered = true;
    }
    if (planner::should_replan(executed, plan_len, entered))
      replan(executed >= plan_len ? "plan-complete" : "new-hv");
  }

  static tracker::LatState lateral_state(const Body& b, const ReferencePath& ref)
  {
    const double h = ref.heading_at(b.state.s);
    return {(b.state.y - ref.y_at(b.state.s)) * std::cos(h), b.heading - h};
  }

  double shape_accel(double a, double v) const
  {
    const auto& p = cfg_.lon;
    a = std::clamp(a, p.a_min, p.a_max);
    if (v + a * p.dt > p.v_max) a = (p.v_max - v) / p.dt;
    if (v + a * p.dt < p.v_min) a = (p.v_min - v) / p.dt;
    return std::clamp(a, p.a_min, p.a_max);
  }

  Command cav_command(std::size_t i)
  {
    const auto& b = world_.bodies[i];
    Command cmd;
    double phi = b.heading;
    if (controller_ == Controller::Swarming) {
      const auto& tr = tracks_[i];
      const int k = world_.tick - tr.tick0;
      cmd.accel = shape_accel(tr.lon.feedback(k, Eigen::Vector2d(b.state.s, b.state.v))(0), b.state.v);
      const auto lat = lateral_state(b, tr.ref);
      const int station = static_cast<int>(std::lround((tr.ref.sigma_at(b.state.s) - tr.sigma0) / cfg_.lat.ds));
      cmd.steer = std::clamp(tr.lat.feedback(station, Eigen::Vector2d(lat.l, lat.phi))(0), -cfg_.lat.steer_max,
                             cfg_.lat.steer_max);
      phi = lat.phi;
    } else {
      const auto& c = cfg_.cacc;
      const double v = b.state.v;
      double a = c.k_speed * (cfg_.cruise_speed - v);
      if (const auto lead = leader_of(world_, i, road_.vehicle_width)) {
        const auto& p = world_.bodies[*lead].state;
        const double gap = p.s - b.state.s - road_.vehicle_length;
        const double follow = c.k_gap * (gap - (c.standstill_gap + c.headway * v)) + c.k_speed * (p.v - v);
        a = std::min(a, follow);
      }
      cmd.accel = shape_accel(a, v);
    }
    log_.controls.push_back(
        {b.state.id, world_.t, cmd.accel, cmd.steer, b.state.s, b.state.y, b.state.v, phi});
    return cmd;
  }

  Command hv_command(std::size_t j) const
  {
    const double band = 0.5 * (cfg_.lane_width + road_.vehicle_width);
    std::optional<VehicleState> leader;
    if (const auto lead = leader_of(world_, j, band)) leader = world_.bodies[*lead].state;
    return {idm_accel(world_.bodies[j].state, leader, idm_[j - n_cav_]), 0.0};
  }

  void record()
  {
    TickRecord r;
    r.t = world_.t;
    r.vehicles.reserve(world_.bodies.size());
    for (const auto& b : world_.bodies) r.vehicles.push_back(b.state);
    log_.ticks.push_back(std::move(r));
  }

  const ScenarioConfig& cfg_;
  Controller controller_;
  Road road_;
  SimLog log_;
  World world_;
  std::size_t n_cav_ = 0;
  std::vector<IdmParams> idm_;
  std::vector<CavTrack> tracks_;
  std::set<std::string> in_grid_;
};

}  // namespace

std::vector<std::size_t> SimLog::cav_indices() const
{
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < vehicles.size(); ++i)
    if (vehicles[i].kind == VehicleKind::Cav) out.push_back(i);
  return out;
}

Road road_of(const ScenarioConfig& cfg)
{
  return {centred_lanes(cfg.lane_count, cfg.lane_width), cfg.vehicle_length, cfg.vehicle_width, cfg.wheelbase};
}

std::vector<Collision> find_collisions(const World& world, const Road& road)
{
  std::vector<Collision> out;
  for (std::size_t i = 0; i < world.bodies.size(); ++i)
    for (std::size_t j = i + 1; j < world.bodies.size(); ++j)
      if (overlaps(world.bodies[i].state, world.bodies[j].state, road))
        out.push_back({world.t, world.tick, world.bodies[i].state.id, world.bodies[j].state.id});
  return out;
}

TickResult step_tick(const World& world, const std::vector<Command>& commands, const Road& road, double dt)
{
  if (!(dt > 0.0)) throw std::invalid_argument("step_tick: dt must be positive");
  if (commands.size() != world.bodies.size()) throw std::invalid_argument("step_tick: one command per vehicle");
  TickResult r;
  r.world.tick = world.tick + 1;
  r.world.t = r.world.tick * dt;
  r.world.bodies.reserve(world.bodies.size());
  for (std::size_t i = 0; i < world.bodies.size(); ++i) {
    const auto& b = world.bodies[i];
    const auto& u = commands[i];
    Body n = b;
    if (b.state.kind == VehicleKind::Cav) {
      const double v = b.state.v;
      n.state.s += v * std::cos(b.heading) * dt;
      n.state.y += v * std::sin(b.heading) * dt;
      n.heading += v / road.wheelbase * std::tan(u.steer) * dt;
      n.state.v = std::max(0.0, v + u.accel * dt);
      n.state.a = u.accel;
    } else {
      n.state = step_hv(b.state, u.accel, dt);
    }
    n.state.lane = nearest_lane(road.lane_y, n.state.y);
    r.world.bodies.push_back(std::move(n));
  }
  r.collisions = find_collisions(r.world, road);
  return r;
}

World initial_world(const ScenarioConfig& cfg, Controller controller, std::vector<VehicleInfo>* info)
{
  const auto lanes = centred_lanes(cfg.lane_count, cfg.lane_width);
  World w;
  auto add = [&](VehicleInfo vi, double s, int lane, double v) {
    Body b;
    b.state.id = vi.id;
    b.state.kind = vi.kind;
    b.state.s = s;
    b.state.y = lanes[static_cast<std::size_t>(lane - 1)];
    b.state.v = v;
    b.state.lane = lane;
    w.bodies.push_back(b);
    if (info) info->push_back(std::move(vi));
  };
  if (controller != Controller::HvOnly)
    for (int i = 0; i < cfg.cav_count; ++i)
      add({"cav" + std::to_string(i + 1), VehicleKind::Cav, "", 0}, cfg.rear_cav_s + i * cfg.cav_spacing,
          cfg.platoon_lane, cfg.initial_speed.value_or(cfg.cruise_speed));
  const double lead_s = cfg.rear_cav_s + (cfg.cav_count - 1) * cfg.cav_spacing;
  if (cfg.front_hv)
    add({"hv_front", VehicleKind::Hv, "front", 1}, lead_s + cfg.front_hv_gap, cfg.platoon_lane, cfg.front_hv_speed);
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> jitter(-cfg.position_jitter, cfg.position_jitter);
  for (const auto& st : cfg.streams)
    for (int j = 1; j <= st.count; ++j) {
      const double dj = cfg.position_jitter > 0.0 ? jitter(rng) : 0.0;
      add({"hv_" + st.name + std::to_string(j), VehicleKind::Hv, st.name, j},
          cfg.rear_cav_s + st.lead_s - (j - 1) * st.spacing + dj, st.lane, st.speed);
    }
  return w;
}

SimLog run_scenario(const ScenarioConfig& cfg) { return run_scenario(cfg, cfg.controller); }

SimLog run_scenario(const ScenarioConfig& cfg, Controller controller)
{
  validate(cfg);
  return Loop(cfg, controller).run();
}

EpisodeRecord plan_first_episode(const ScenarioConfig& cfg)
{
  validate(cfg);
  return Loop(cfg, Controller::Swarming).plan_episode("start");
}

}  // namespace vswarm::sim
