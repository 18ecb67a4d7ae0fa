#include "vswarm/sim/moe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace vswarm::sim {

SpeedStats speed_stats(const std::vector<double>& v)
{
  SpeedStats s;
  if (v.empty()) return s;
  s.samples = static_cast<int>(v.size());
  s.min = *std::min_element(v.begin(), v.end());
  s.max = *std::max_element(v.begin(), v.end());
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / s.samples;
  double sq = 0.0;
  for (double x : v) sq += (x - s.mean) * (x - s.mean);
  s.variance = sq / s.samples;
  // Keep the mean inside the recorded range despite rounding.
  s.mean = std::clamp(s.mean, s.min, s.max);
  return s;
}

MoeOptions moe_options(const ScenarioConfig& cfg)
{
  MoeOptions o;
  o.vehicle_length = cfg.vehicle_length;
  o.vehicle_width = cfg.vehicle_width;
  o.lane_width = cfg.lane_width;
  o.following_range = cfg.following_range;
  o.segment_length = cfg.segment_length;
  return o;
}

double covered_distance(const SimLog& log)
{
  const auto cavs = log.cav_indices();
  if (cavs.empty() || log.ticks.empty()) return 0.0;
  double d = std::numeric_limits<double>::infinity();
  for (auto i : cavs) d = std::min(d, log.ticks.back().vehicles[i].s - log.ticks.front().vehicles[i].s);
  return d;
}

namespace {

std::optional<double> crossing_time(const SimLog& log, std::size_t i, double length)
{
  const double goal = log.ticks.front().vehicles[i].s + length;
  for (std::size_t k = 1; k < log.ticks.size(); ++k) {
    const double a = log.ticks[k - 1].vehicles[i].s;
    const double b = log.ticks[k].vehicles[i].s;
    if (b >= goal) {
      const double w = b > a ? (goal - a) / (b - a) : 1.0;
      const double t0 = log.ticks[k - 1].t, t1 = log.ticks[k].t;
      return t0 + w * (t1 - t0) - log.ticks.front().t;
    }
  }
  if (length <= 0.0) return 0.0;
  return std::nullopt;
}

// Nearest vehicle ahead in `candidates` whose centre is within `band` laterally.
std::optional<std::size_t> ahead(const std::vector<VehicleState>& v, std::size_t ego,
                                 const std::vector<std::size_t>& candidates, double band)
{
  std::optional<std::size_t> best;
  for (auto j : candidates) {
    if (j == ego || v[j].s <= v[ego].s || std::abs(v[j].y - v[ego].y) >= band) continue;
    if (!best || v[j].s < v[*best].s) best = j;
  }
  return best;
}

}  // namespace

MoeReport compute_moes(const SimLog& log, const SimLog* reference, const MoeOptions& o)
{
  MoeReport r;
  const auto cavs = log.cav_indices();
  std::vector<std::size_t> all(log.vehicles.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;

  std::vector<double> platoon;
  r.segment_length = o.segment_length.value_or(covered_distance(log));
  for (auto i : cavs) {
    std::vector<double> v;
    v.reserve(log.ticks.size());
    for (const auto& t : log.ticks) v.push_back(t.vehicles[i].v);
    platoon.insert(platoon.end(), v.begin(), v.end());
    CavMoe m{log.vehicles[i].id, speed_stats(v), std::nullopt};
    if (!log.ticks.empty()) m.travel_time = crossing_time(log, i, r.segment_length);
    r.cavs.push_back(m);
  }
  r.platoon = speed_stats(platoon);
  if (!cavs.empty()) {
    r.travel_time = 0.0;
    for (const auto& c : r.cavs) {
      if (!c.travel_time) {
        r.travel_time.reset();
        break;
      }
      r.travel_time = std::max(*r.travel_time, *c.travel_time);
    }
  }

  // CAV following distances: bumper gap to the nearest CAV ahead whose
  // footprint overlaps laterally.
  std::map<std::pair<std::size_t, std::size_t>, FollowingPair> pairs;
  double sum = 0.0;
  r.following_min = std::numeric_limits<double>::infinity();
  for (const auto& t : log.ticks)
    for (auto i : cavs) {
      const auto j = ahead(t.vehicles, i, cavs, o.vehicle_width);
      if (!j) continue;
      const double gap = t.vehicles[*j].s - t.vehicles[i].s - o.vehicle_length;
      if (gap > o.following_range) continue;
      auto& p = pairs[{i, *j}];
      if (p.samples == 0) {
        p.follower = log.vehicles[i].id;
        p.leader = log.vehicles[*j].id;
        p.min = gap;
      }
      p.avg += gap;
      p.min = std::min(p.min, gap);
      ++p.samples;
      sum += gap;
      r.following_min = std::min(r.following_min, gap);
      ++r.following_samples;
    }
  for (auto& [key, p] : pairs) {
    p.avg /= p.samples;
    r.pairs.push_back(p);
  }
  if (r.following_samples > 0)
    r.following_avg = sum / r.following_samples;
  else
    r.following_min = 0.0;

  // Upstream streams against the HV-only reference run.
  std::map<std::string, std::size_t> ref_index;
  if (reference)
    for (std::size_t i = 0; i < reference->vehicles.size(); ++i) ref_index[reference->vehicles[i].id] = i;
  auto mean_speed = [](const SimLog& l, std::size_t i) {
    double s = 0.0;
    for (const auto& t : l.ticks) s += t.vehicles[i].v;
    return l.ticks.empty() ? 0.0 : s / static_cast<double>(l.ticks.size());
  };
  std::map<int, std::pair<double, int>> by_index;
  const double band = 0.5 * (o.lane_width + o.vehicle_width);
  for (std::size_t i = 0; i < log.vehicles.size(); ++i) {
    const auto& info = log.vehicles[i];
    if (info.kind != VehicleKind::Hv || info.stream.empty() || info.stream == "front") continue;
    UpstreamHv u{info.id, info.stream, info.stream_index, mean_speed(log, i), std::nullopt, std::nullopt};
    if (auto it = ref_index.find(info.id); it != ref_index.end()) {
      u.reference_speed = mean_speed(*reference, it->second);
      if (*u.reference_speed > 0.0) {
        u.reduction_pct = 100.0 * (*u.reference_speed - u.avg_speed) / *u.reference_speed;
        auto& acc = by_index[info.stream_index];
        acc.first += *u.reduction_pct;
        ++acc.second;
      }
    }
    r.upstream.push_back(u);
    for (const auto& t : log.ticks) {
      const auto j = ahead(t.vehicles, i, all, band);
      if (!j) continue;
      const double gap = t.vehicles[*j].s - t.vehicles[i].s - o.vehicle_length;
      if (!r.upstream_min_gap || gap < *r.upstream_min_gap) {
        r.upstream_min_gap = gap;
        r.upstream_min_gap_speed = t.vehicles[i].v;
      }
    }
  }
  if (!by_index.empty()) r.reduction_by_index.resize(static_cast<std::size_t>(by_index.rbegin()->first));
  for (const auto& [index, acc] : by_index)
    if (index >= 1) r.reduction_by_index[static_cast<std::size_t>(index - 1)] = acc.first / acc.second;
  if (r.upstream_min_gap && r.upstream_min_gap_speed > 0.0)
    r.upstream_min_gap_headway = *r.upstream_min_gap / r.upstream_min_gap_speed;
  return r;
}

}  // namespace vswarm::sim
