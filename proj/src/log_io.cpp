#include "vswarm/sim/log_io.hpp"

#include <map>

#include "json.hpp"
#include "vswarm/io/csv.hpp"
#include "vswarm/planner/plan_io.hpp"

namespace vswarm::sim {

using nlohmann::json;

namespace {

const char* kind_name(VehicleKind k) { return k == VehicleKind::Cav ? "cav" : "hv"; }

json cell_json(CellIndex c) { return {{"row", c.row}, {"col", c.col}}; }

template <typename T>
json optional_json(const std::optional<T>& v)
{
  return v ? json(*v) : json(nullptr);
}

json stats_json(const SpeedStats& s)
{
  return {{"mean", s.mean}, {"min", s.min}, {"max", s.max}, {"variance", s.variance}, {"samples", s.samples}};
}

json report_json(const MoeReport& r)
{
  json cavs = json::array();
  for (const auto& c : r.cavs)
    cavs.push_back({{"id", c.id}, {"speed", stats_json(c.speed)}, {"travel_time", optional_json(c.travel_time)}});

  json pairs = json::array();
  for (const auto& p : r.pairs)
    pairs.push_back(
        {{"follower", p.follower}, {"leader", p.leader}, {"avg", p.avg}, {"min", p.min}, {"samples", p.samples}});

  json upstream = json::array();
  for (const auto& u : r.upstream)
    upstream.push_back({{"id", u.id},
                        {"stream", u.stream},
                        {"index", u.index},
                        {"avg_speed", u.avg_speed},
                        {"reference_speed", optional_json(u.reference_speed)},
                        {"reduction_pct", optional_json(u.reduction_pct)}});

  return {{"platoon_speed", stats_json(r.platoon)},
          {"cavs", std::move(cavs)},
          {"segment_length", r.segment_length},
          {"travel_time", optional_json(r.travel_time)},
          {"following",
           {{"avg", r.following_avg},
            {"min", r.following_min},
            {"samples", r.following_samples},
            {"pairs", std::move(pairs)}}},
          {"upstream",
           {{"vehicles", std::move(upstream)},
            {"reduction_pct_by_index", r.reduction_by_index},
            {"min_gap", optional_json(r.upstream_min_gap)},
            {"min_gap_speed", r.upstream_min_gap_speed},
            {"min_gap_headway", optional_json(r.upstream_min_gap_headway)}}}};
}

}  // namespace

void write_trajectories(std::ostream& os, const SimLog& log)
{
  io::CsvWriter w(os);
  w.header({"vehicle_id", "kind", "t", "s", "y", "v", "a"});
  for (const auto& tick : log.ticks)
    for (const auto& v : tick.vehicles) w.row(v.id, kind_name(v.kind), tick.t, v.s, v.y, v.v, v.a);
}

void write_controls(std::ostream& os, const SimLog& log)
{
  io::CsvWriter w(os);
  w.header({"cav_id", "t", "a_cmd", "delta_cmd", "s", "y", "v", "phi"});
  for (const auto& c : log.controls) w.row(c.cav_id, c.t, c.a_cmd, c.steer_cmd, c.s, c.y, c.v, c.phi);
}

SimLog read_trajectories(std::istream& is)
{
  const io::CsvTable table = io::read_csv(is);
  std::size_t c_id, c_kind, c_t, c_s, c_y, c_v, c_a;
  try {
    c_id = table.column("vehicle_id");
    c_kind = table.column("kind");
    c_t = table.column("t");
    c_s = table.column("s");
    c_y = table.column("y");
    c_v = table.column("v");
    c_a = table.column("a");
  } catch (const std::out_of_range&) {
    throw io::CsvParseError(1, "trajectories header must contain vehicle_id,kind,t,s,y,v,a");
  }

  SimLog log;
  std::map<std::string, std::size_t> slot;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const int line = table.lines[r];
    VehicleState v;
    v.id = row[c_id];
    if (row[c_kind] == "cav")
      v.kind = VehicleKind::Cav;
    else if (row[c_kind] == "hv")
      v.kind = VehicleKind::Hv;
    else
      throw io::CsvParseError(line, "unknown vehicle kind '" + row[c_kind] + "'");
    const double t = table.number(r, c_t);
    v.s = table.number(r, c_s);
    v.y = table.number(r, c_y);
    v.v = table.number(r, c_v);
    v.a = table.number(r, c_a);

    if (log.ticks.empty() || t != log.ticks.back().t) {
      if (!log.ticks.empty()) {
        if (t < log.ticks.back().t) throw io::CsvParseError(line, "time goes backwards");
        if (log.ticks.back().vehicles.size() != log.vehicles.size())
          throw io::CsvParseError(line, "previous tick is missing vehicles");
      }
      log.ticks.push_back({t, {}});
    }
    auto& tick = log.ticks.back();
    if (log.ticks.size() == 1) {
      if (!slot.emplace(v.id, log.vehicles.size()).second) throw io::CsvParseError(line, "duplicate vehicle " + v.id);
      log.vehicles.push_back({v.id, v.kind, {}, 0});
    } else {
      const auto it = slot.find(v.id);
      if (it == slot.end()) throw io::CsvParseError(line, "vehicle " + v.id + " not present in the first tick");
      if (it->second != tick.vehicles.size()) throw io::CsvParseError(line, "vehicle order differs between ticks");
    }
    tick.vehicles.push_back(std::move(v));
  }
  if (log.ticks.empty()) throw io::CsvParseError(table.lines.empty() ? 1 : table.lines.back(), "log has no rows");
  if (log.ticks.back().vehicles.size() != log.vehicles.size())
    throw io::CsvParseError(table.lines.back(), "last tick is missing vehicles");
  if (log.ticks.size() > 1) log.dt = log.ticks[1].t - log.ticks[0].t;
  return log;
}

std::string episodes_to_json(const SimLog& log)
{
  json episodes = json::array();
  for (const auto& e : log.episodes) {
    json blocking = json::array();
    for (const auto& b : e.blocking)
      blocking.push_back({{"k", b.k},
                          {"cav", b.cav},
                          {"hv", e.hv_ids.at(static_cast<std::size_t>(b.hv))},
                          {"target_col", b.target_col},
                          {"row_lo", b.row_lo},
                          {"row_hi", b.row_hi}});
    json init = json::array();
    for (const auto& c : e.init_cells) init.push_back(cell_json(c));
    json hvs = json::array();
    for (std::size_t h = 0; h < e.hv_ids.size(); ++h) {
      json cells = json::array();
      for (const auto& c : e.forecast.hvs[h].cells) cells.push_back(c ? cell_json(*c) : json(nullptr));
      hvs.push_back({{"id", e.hv_ids[h]}, {"cells", std::move(cells)}});
    }
    episodes.push_back(
        {{"index", e.index},
         {"tick", e.tick},
         {"t", e.t},
         {"trigger", e.trigger},
         {"mode", e.mode == GridMode::Overtaking ? "overtaking" : "cruising"},
         {"grid",
          {{"s0", e.grid.s0},
           {"v_cell", e.grid.v_cell},
           {"n_rows", e.grid.n_rows},
           {"n_cols", e.grid.n_cols},
           {"l_cell", e.grid.l_cell},
           {"w_cell", e.grid.w_cell}}},
         {"init_cells", std::move(init)},
         {"hv_forecast", std::move(hvs)},
         {"front_hv", e.forecast.front_hv ? json(e.hv_ids.at(static_cast<std::size_t>(*e.forecast.front_hv)))
                                          : json(nullptr)},
         {"delta", e.delta},
         {"blocking", std::move(blocking)},
         {"plan", json::parse(planner::plan_to_json(e.plan))},
         {"solver", {{"nodes", e.stats.nodes}, {"memo_prunes", e.stats.memo_prunes}, {"root_bound", e.stats.root_bound}}},
         {"violations", e.violations}});
  }
  json collisions = json::array();
  for (const auto& c : log.collisions) collisions.push_back({{"t", c.t}, {"tick", c.tick}, {"a", c.a}, {"b", c.b}});

  const json j = {{"controller", to_string(log.controller)},
                  {"dt", log.dt},
                  {"ticks", log.ticks.size()},
                  {"aborted", log.aborted},
                  {"abort_reason", log.abort_reason},
                  {"collisions", std::move(collisions)},
                  {"episodes", std::move(episodes)}};
  return j.dump(2) + "\n";
}

std::string moes_to_json(const MoeReport& report) { return report_json(report).dump(2) + "\n"; }

std::string comparison_to_json(const MoeReport& swarm, const MoeReport& baseline)
{
  const double uplift = baseline.platoon.mean > 0.0 ? 100.0 * (swarm.platoon.mean / baseline.platoon.mean - 1.0) : 0.0;
  const json j = {{"swarm", report_json(swarm)},
                  {"baseline", report_json(baseline)},
                  {"comparison",
                   {{"swarm_avg_speed", swarm.platoon.mean},
                    {"baseline_avg_speed", baseline.platoon.mean},
                    {"uplift_pct", uplift}}}};
  return j.dump(2) + "\n";
}

}  // namespace vswarm::sim
