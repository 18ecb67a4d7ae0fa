#include "vswarm/sim/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace vswarm::sim {

using nlohmann::json;

int ScenarioConfig::ticks_per_step() const { return static_cast<int>(std::lround(dt_b / lon.dt)); }

int ScenarioConfig::tick_count() const { return static_cast<int>(std::lround(duration / lon.dt)); }

std::string to_string(Controller c)
{
  switch (c) {
    case Controller::Swarming: return "swarming";
    case Controller::Baseline: return "baseline";
    case Controller::HvOnly: return "hv-only";
  }
  return "swarming";
}

Controller controller_from_string(const std::string& s)
{
  if (s == "swarming" || s == "swarm") return Controller::Swarming;
  if (s == "baseline" || s == "baseline-cacc") return Controller::Baseline;
  if (s == "hv-only") return Controller::HvOnly;
  throw ConfigError("unknown controller '" + s + "'");
}

namespace {

template <typename T>
void read(const json& j, const char* key, T& out)
{
  if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

const json& section(const json& j, const char* key)
{
  static const json empty = json::object();
  if (!j.contains(key)) return empty;
  if (!j.at(key).is_object()) throw ConfigError(std::string("'") + key + "' must be an object");
  return j.at(key);
}

}  // namespace

ScenarioConfig parse_config(const std::string& json_text)
{
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");

  ScenarioConfig c;
  try {
    const auto& road = section(j, "road");
    read(road, "lane_count", c.lane_count);
    read(road, "lane_width", c.lane_width);

    const auto& veh = section(j, "vehicle");
    read(veh, "length", c.vehicle_length);
    read(veh, "width", c.vehicle_width);
    read(veh, "wheelbase", c.wheelbase);

    const auto& pl = section(j, "platoon");
    read(pl, "count", c.cav_count);
    read(pl, "spacing", c.cav_spacing);
    read(pl, "speed", c.cruise_speed);
    if (pl.contains("initial_speed") && !pl.at("initial_speed").is_null())
      c.initial_speed = pl.at("initial_speed").get<double>();
    read(pl, "lane", c.platoon_lane);
    read(pl, "rear_s", c.rear_cav_s);

    if (j.contains("front_hv") && j.at("front_hv").is_null()) {
      c.front_hv = false;
    } else {
      const auto& fh = section(j, "front_hv");
      read(fh, "gap", c.front_hv_gap);
      read(fh, "speed", c.front_hv_speed);
    }

    if (j.contains("hv_streams")) {
      for (const auto& s : j.at("hv_streams")) {
        HvStream h;
        read(s, "name", h.name);
        read(s, "lane", h.lane);
        read(s, "lead_s", h.lead_s);
        read(s, "spacing", h.spacing);
        read(s, "count", h.count);
        read(s, "speed", h.speed);
        c.streams.push_back(h);
      }
    }

    const auto& idm = section(j, "idm");
    read(idm, "v0", c.idm.v0);
    read(idm, "T", c.idm.T);
    read(idm, "a_max", c.idm.a_max);
    read(idm, "b", c.idm.b);
    read(idm, "s0", c.idm.s0_jam);
    read(idm, "delta", c.idm.delta_exp);

    if (j.contains("controller")) c.controller = controller_from_string(j.at("controller").get<std::string>());

    const auto& p = section(j, "planner");
    read(p, "w_tar", c.weights.w_tar);
    read(p, "w_lon", c.weights.w_lon);
    read(p, "w_lat", c.weights.w_lat);
    read(p, "l_index", c.weights.l_index);
    read(p, "horizon", c.horizon);
    read(p, "safety_distance", c.safety_distance);
    if (p.contains("cell_length") && !p.at("cell_length").is_null()) c.cell_length = p.at("cell_length").get<double>();
    read(p, "detection_range", c.detection_range);
    read(p, "max_nodes", c.solve_limits.max_nodes);
    read(p, "max_seconds", c.solve_limits.max_seconds);

    const auto& t = section(j, "tracker");
    read(t, "q_s", c.lon.q_s);
    read(t, "q_v", c.lon.q_v);
    read(t, "r_lon", c.lon.r);
    read(t, "q_l", c.lat.q_l);
    read(t, "q_phi", c.lat.q_phi);
    read(t, "r_lat", c.lat.r);
    read(t, "a_min", c.lon.a_min);
    read(t, "a_max", c.lon.a_max);
    read(t, "v_min", c.lon.v_min);
    read(t, "v_max", c.lon.v_max);
    read(t, "steer_max", c.lat.steer_max);

    const auto& cacc = section(j, "cacc");
    read(cacc, "headway", c.cacc.headway);
    read(cacc, "standstill_gap", c.cacc.standstill_gap);
    read(cacc, "k_gap", c.cacc.k_gap);
    read(cacc, "k_speed", c.cacc.k_speed);

    const auto& tm = section(j, "timing");
    read(tm, "dt_b", c.dt_b);
    read(tm, "dt", c.lon.dt);
    read(tm, "ds", c.lat.ds);
    read(tm, "duration", c.duration);

    const auto& m = section(j, "moe");
    read(m, "min_safety_distance", c.min_safety_distance);
    read(m, "following_range", c.following_range);
    if (m.contains("segment_length") && !m.at("segment_length").is_null())
      c.segment_length = m.at("segment_length").get<double>();

    read(j, "seed", c.seed);
    read(j, "position_jitter", c.position_jitter);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  c.lat.wheelbase = c.wheelbase;
  c.idm.vehicle_length = c.vehicle_length;
  c.idm.accel_min = c.lon.a_min;
  c.idm.accel_max = c.lon.a_max;
  validate(c);
  return c;
}

ScenarioConfig load_config(const std::string& path)
{
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const ScenarioConfig& c)
{
  json j;
  j["road"] = {{"lane_count", c.lane_count}, {"lane_width", c.lane_width}};
  j["vehicle"] = {{"length", c.vehicle_length}, {"width", c.vehicle_width}, {"wheelbase", c.wheelbase}};
  j["platoon"] = {{"count", c.cav_count},
                  {"spacing", c.cav_spacing},
                  {"speed", c.cruise_speed},
                  {"initial_speed", c.initial_speed ? json(*c.initial_speed) : json(nullptr)},
                  {"lane", c.platoon_lane},
                  {"rear_s", c.rear_cav_s}};
  if (c.front_hv)
    j["front_hv"] = {{"gap", c.front_hv_gap}, {"speed", c.front_hv_speed}};
  else
    j["front_hv"] = nullptr;
  j["hv_streams"] = json::array();
  for (const auto& s : c.streams)
    j["hv_streams"].push_back({{"name", s.name},
                               {"lane", s.lane},
                               {"lead_s", s.lead_s},
                               {"spacing", s.spacing},
                               {"count", s.count},
                               {"speed", s.speed}});
  j["idm"] = {{"v0", c.idm.v0}, {"T", c.idm.T},      {"a_max", c.idm.a_max},
              {"b", c.idm.b},   {"s0", c.idm.s0_jam}, {"delta", c.idm.delta_exp}};
  j["controller"] = to_string(c.controller);
  j["planner"] = {{"w_tar", c.weights.w_tar},
                  {"w_lon", c.weights.w_lon},
                  {"w_lat", c.weights.w_lat},
                  {"l_index", c.weights.l_index},
                  {"horizon", c.horizon},
                  {"safety_distance", c.safety_distance},
                  {"cell_length", c.cell_length ? json(*c.cell_length) : json(nullptr)},
                  {"detection_range", c.detection_range},
                  {"max_nodes", c.solve_limits.max_nodes},
                  {"max_seconds", c.solve_limits.max_seconds}};
  j["tracker"] = {{"q_s", c.lon.q_s},     {"q_v", c.lon.q_v},       {"r_lon", c.lon.r},
                  {"q_l", c.lat.q_l},     {"q_phi", c.lat.q_phi},   {"r_lat", c.lat.r},
                  {"a_min", c.lon.a_min}, {"a_max", c.lon.a_max},   {"v_min", c.lon.v_min},
                  {"v_max", c.lon.v_max}, {"steer_max", c.lat.steer_max}};
  j["cacc"] = {{"headway", c.cacc.headway},
               {"standstill_gap", c.cacc.standstill_gap},
               {"k_gap", c.cacc.k_gap},
               {"k_speed", c.cacc.k_speed}};
  j["timing"] = {{"dt_b", c.dt_b}, {"dt", c.lon.dt}, {"ds", c.lat.ds}, {"duration", c.duration}};
  j["moe"] = {{"min_safety_distance", c.min_safety_distance},
              {"following_range", c.following_range},
              {"segment_length", c.segment_length ? json(*c.segment_length) : json(nullptr)}};
  j["seed"] = c.seed;
  j["position_jitter"] = c.position_jitter;
  return j.dump(2) + "\n";
}

void validate(const ScenarioConfig& c)
{
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(what);
  };
  require(c.lane_count >= 1, "road.lane_count must be at least 1");
  require(c.lane_width > 0, "road.lane_width must be positive");
  require(c.vehicle_length > 0 && c.vehicle_width > 0 && c.wheelbase > 0, "vehicle dimensions must be positive");
  require(c.cav_count >= 1, "platoon.count must be at least 1");
  require(c.cav_spacing > c.vehicle_length, "platoon.spacing must exceed the vehicle length");
  require(c.cruise_speed > 0, "platoon.speed must be positive");
  require(!c.initial_speed || *c.initial_speed >= 0, "platoon.initial_speed must be non-negative");
  require(c.platoon_lane >= 1 && c.platoon_lane <= c.lane_count, "platoon.lane outside the road");
  require(!c.front_hv || c.front_hv_gap > c.vehicle_length, "front_hv.gap must exceed the vehicle length");
  require(!c.front_hv || c.front_hv_speed >= 0, "front_hv.speed must be non-negative");
  for (const auto& s : c.streams) {
    require(s.lane >= 1 && s.lane <= c.lane_count, "hv stream lane outside the road");
    require(s.count >= 0, "hv stream count must be non-negative");
    require(s.count <= 1 || s.spacing > c.vehicle_length, "hv stream spacing must exceed the vehicle length");
    require(s.speed >= 0, "hv stream speed must be non-negative");
  }
  try {
    vswarm::validate(c.idm);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  require(c.weights.w_tar >= 0 && c.weights.w_lon >= 0 && c.weights.w_lat >= 0, "planner weights must be non-negative");
  require(c.weights.l_index >= 1 && c.weights.l_index <= c.lane_count, "planner.l_index outside the road");
  require(c.horizon >= 1, "planner.horizon must be at least 1");
  require(c.safety_distance >= 0, "planner.safety_distance must be non-negative");
  require(!c.cell_length || *c.cell_length > 0, "planner.cell_length must be positive");
  require(c.detection_range > 0, "planner.detection_range must be positive");
  require(c.lon.q_s >= 0 && c.lon.q_v >= 0 && c.lon.r > 0, "longitudinal tracker weights invalid");
  require(c.lat.q_l >= 0 && c.lat.q_phi >= 0 && c.lat.r > 0, "lateral tracker weights invalid");
  require(c.lon.a_min < 0 && c.lon.a_max > 0, "acceleration range must straddle zero");
  require(c.lon.v_min >= 0 && c.lon.v_max > c.lon.v_min, "speed range invalid");
  require(c.lat.steer_max > 0, "tracker.steer_max must be positive");
  require(c.lon.dt > 0 && c.lat.ds > 0 && c.dt_b > 0, "time and distance steps must be positive");
  require(std::abs(c.dt_b / c.lon.dt - std::round(c.dt_b / c.lon.dt)) < 1e-6,
          "timing.dt_b must be a whole number of ticks");
  require(c.duration >= c.dt_b, "timing.duration shorter than one behaviour step");
  require(c.duration >= c.horizon * c.dt_b, "timing.duration must cover the planning horizon");
  require(c.min_safety_distance >= 0 && c.following_range > 0 && (!c.segment_length || *c.segment_length > 0),
          "moe settings invalid");
  require(c.position_jitter >= 0, "position_jitter must be non-negative");
}

}  // namespace vswarm::sim
