#include "vswarm/cli/commands.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "vswarm/io/csv.hpp"
#include "vswarm/io/svg.hpp"
#include "vswarm/planner/plan_io.hpp"
#include "vswarm/planner/validate.hpp"
#include "vswarm/sim/log_io.hpp"
#include "vswarm/sim/moe.hpp"

namespace vswarm::cli {

namespace fs = std::filesystem;
using namespace vswarm::sim;

namespace {

void note(const Streams& io, Verbosity level, const std::string& msg)
{
  if (io.verbosity >= level) io.err << msg << '\n';
}

void write_file(const fs::path& path, const std::string& text)
{
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

template <typename Fn>
void write_stream(const fs::path& path, Fn&& fn)
{
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  fn(f);
}

std::string read_file(const fs::path& path)
{
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

ScenarioConfig checked_config(const std::string& path)
{
  ScenarioConfig cfg = load_config(path);
  validate(cfg);
  return cfg;
}

/// Bumper gap from vehicle i to the nearest vehicle ahead overlapping the band, if any.
std::optional<double> gap_ahead(const TickRecord& tick, std::size_t i, double band, double length,
                                bool cav_only)
{
  const auto& me = tick.vehicles[i];
  std::optional<double> best;
  for (std::size_t j = 0; j < tick.vehicles.size(); ++j) {
    const auto& o = tick.vehicles[j];
    if (j == i || (cav_only && o.kind != VehicleKind::Cav)) continue;
    if (std::abs(o.y - me.y) >= band || o.s <= me.s) continue;
    const double gap = o.s - me.s - length;
    if (!best || gap < *best) best = gap;
  }
  return best;
}

struct Figure
{
  std::string file;
  io::Chart chart;
};

std::vector<Figure> figures(const SimLog& log)
{
  const ScenarioConfig defaults;
  const double length = defaults.vehicle_length, width = defaults.vehicle_width;
  const double lane_band = 0.5 * (defaults.lane_width + width);

  Figure s_t{"cav_s_t", {"CAV longitudinal position", "t [s]", "s [m]", {}}};
  Figure y_t{"cav_y_t", {"CAV lateral position", "t [s]", "y [m]", {}}};
  Figure speed{"platoon_speed", {"Platoon average speed", "t [s]", "v [m/s]", {{"platoon", {}, {}}}}};
  Figure follow{"cav_following", {"CAV following distance", "t [s]", "gap [m]", {}}};
  Figure hv_v{"upstream_speed", {"HV speeds", "t [s]", "v [m/s]", {}}};
  Figure hv_gap{"upstream_gap", {"HV following distance", "t [s]", "gap [m]", {}}};

  std::vector<std::size_t> cav_series(log.vehicles.size()), hv_series(log.vehicles.size());
  for (std::size_t i = 0; i < log.vehicles.size(); ++i) {
    const auto& id = log.vehicles[i].id;
    if (log.vehicles[i].kind == VehicleKind::Cav) {
      cav_series[i] = s_t.chart.series.size();
      for (auto* f : {&s_t, &y_t, &follow}) f->chart.series.push_back({id, {}, {}});
    } else {
      hv_series[i] = hv_v.chart.series.size();
      for (auto* f : {&hv_v, &hv_gap}) f->chart.series.push_back({id, {}, {}});
    }
  }

  for (const auto& tick : log.ticks) {
    double sum = 0.0;
    int n = 0;
    for (std::size_t i = 0; i < tick.vehicles.size(); ++i) {
      const auto& v = tick.vehicles[i];
      if (v.kind == VehicleKind::Cav) {
        const std::size_t k = cav_series[i];
        s_t.chart.series[k].x.push_back(tick.t);
        s_t.chart.series[k].y.push_back(v.s);
        y_t.chart.series[k].x.push_back(tick.t);
        y_t.chart.series[k].y.push_back(v.y);
        if (const auto g = gap_ahead(tick, i, width, length, true)) {
          follow.chart.series[k].x.push_back(tick.t);
          follow.chart.series[k].y.push_back(*g);
        }
        sum += v.v;
        ++n;
      } else {
        const std::size_t k = hv_series[i];
        hv_v.chart.series[k].x.push_back(tick.t);
        hv_v.chart.series[k].y.push_back(v.v);
        if (const auto g = gap_ahead(tick, i, lane_band, length, false)) {
          hv_gap.chart.series[k].x.push_back(tick.t);
          hv_gap.chart.series[k].y.push_back(*g);
        }
      }
    }
    if (n > 0) {
      speed.chart.series[0].x.push_back(tick.t);
      speed.chart.series[0].y.push_back(sum / n);
    }
  }
  return {s_t, y_t, speed, follow, hv_v, hv_gap};
}

void write_figures(const SimLog& log, const fs::path& dir)
{
  fs::create_directories(dir);
  for (const auto& f : figures(log)) {
    write_stream(dir / (f.file + ".svg"), [&](std::ostream& os) { io::write_svg(os, f.chart); });
    write_stream(dir / (f.file + ".csv"), [&](std::ostream& os) {
      io::CsvWriter w(os);
      w.header({"series", "t", "value"});
      for (const auto& s : f.chart.series)
        for (std::size_t i = 0; i < s.x.size(); ++i) w.row(s.name, s.x[i], s.y[i]);
    });
  }
}

void write_logs(const SimLog& log, const fs::path& dir, const std::string& prefix)
{
  write_stream(dir / (prefix + "trajectories.csv"), [&](std::ostream& os) { write_trajectories(os, log); });
  write_stream(dir / (prefix + "controls.csv"), [&](std::ostream& os) { write_controls(os, log); });
  write_file(dir / (prefix + "episodes.json"), episodes_to_json(log));
}

SimLog run_logged(const ScenarioConfig& cfg, Controller c, const Streams& io)
{
  note(io, Verbosity::Info, "running " + to_string(c));
  SimLog log = run_scenario(cfg, c);
  if (io.verbosity >= Verbosity::Debug)
    for (const auto& e : log.episodes)
      io.err << "  episode " << e.index << " t=" << e.t << " trigger=" << e.trigger
             << " blocking=" << e.blocking.size() << " nodes=" << e.stats.nodes << '\n';
  return log;
}

}  // namespace

Verbosity verbosity_from_env()
{
  const char* v = std::getenv("VSWARM_LOG");
  if (!v) return Verbosity::Info;
  const std::string s(v);
  if (s == "quiet" || s == "0") return Verbosity::Quiet;
  if (s == "debug" || s == "2") return Verbosity::Debug;
  return Verbosity::Info;
}

RunMode run_mode_from_string(const std::string& s)
{
  if (s == "swarm") return RunMode::Swarm;
  if (s == "baseline") return RunMode::Baseline;
  if (s == "both") return RunMode::Both;
  throw std::invalid_argument("unknown mode '" + s + "' (swarm, baseline, both)");
}

int cmd_run(const RunManifest& m, const Streams& io)
{
  ScenarioConfig cfg;
  try {
    cfg = checked_config(m.config_path);
  } catch (const std::exception& e) {
    io.err << "error: " << e.what() << '\n';
    return BadInput;
  }

  try {
    fs::create_directories(m.out_dir);
    const bool swarm = m.mode != RunMode::Baseline, baseline = m.mode != RunMode::Swarm;

    std::optional<SimLog> sw, bl;
    if (swarm) sw = run_logged(cfg, Controller::Swarming, io);
    if (baseline) bl = run_logged(cfg, Controller::Baseline, io);
    const SimLog reference = run_logged(cfg, Controller::HvOnly, io);

    const SimLog& primary = sw ? *sw : *bl;
    if (m.logs) {
      write_logs(primary, m.out_dir, "");
      if (sw && bl) write_logs(*bl, m.out_dir, "baseline_");
    }

    for (const SimLog* log : {sw ? &*sw : nullptr, bl ? &*bl : nullptr}) {
      if (log && log->aborted) {
        io.err << "error: " << to_string(log->controller) << " run aborted: " << log->abort_reason << '\n';
        return RunFailed;
      }
    }

    MoeOptions opts = moe_options(cfg);
    if (!opts.segment_length) {
      double seg = covered_distance(primary);
      if (sw && bl) seg = std::min(covered_distance(*sw), covered_distance(*bl));
      opts.segment_length = seg;
    }

    if (m.moes) {
      if (sw && bl) {
        const MoeReport ms = compute_moes(*sw, &reference, opts), mb = compute_moes(*bl, &reference, opts);
        write_file(m.out_dir / "moes.json", comparison_to_json(ms, mb));
        const double uplift = 100.0 * (ms.platoon.mean / mb.platoon.mean - 1.0);
        note(io, Verbosity::Info,
             "platoon speed swarm " + io::format_number(ms.platoon.mean) + " baseline " +
                 io::format_number(mb.platoon.mean) + " uplift " + io::format_number(uplift) + "%");
      } else {
        write_file(m.out_dir / "moes.json", moes_to_json(compute_moes(primary, &reference, opts)));
      }
    }

    if (m.plots) {
      write_figures(primary, m.out_dir / "plots");
      if (sw && bl) write_figures(*bl, m.out_dir / "plots" / "baseline");
    }
    note(io, Verbosity::Info, "wrote " + m.out_dir.string());
    return Ok;
  } catch (const std::exception& e) {
    io.err << "error: " << e.what() << '\n';
    return RunFailed;
  }
}

int cmd_plan(const std::string& config_path, std::optional<int> horizon, const fs::path& plan_out,
             const Streams& io)
{
  ScenarioConfig cfg;
  try {
    cfg = load_config(config_path);
    if (horizon) {
      cfg.horizon = *horizon;
      cfg.duration = std::max(cfg.duration, cfg.horizon * cfg.dt_b);
    }
    validate(cfg);
  } catch (const std::exception& e) {
    io.err << "error: " << e.what() << '\n';
    return BadInput;
  }

  try {
    const EpisodeRecord ep = plan_first_episode(cfg);
    io.out << "mode " << (ep.mode == GridMode::Overtaking ? "overtaking" : "cruising") << ", grid " << ep.grid.n_rows
           << "x" << ep.grid.n_cols << ", blocking assignments " << ep.blocking.size() << ", objective "
           << io::format_number(ep.plan.objective_value) << '\n';
    for (const auto& b : ep.blocking)
      io.out << "  block: cav" << b.cav << " -> column " << b.target_col << " at step " << b.k << " (rows "
             << b.row_lo << ".." << b.row_hi << ")\n";
    planner::print_plan_table(io.out, ep.plan);
    if (ep.violations != 0) {
      io.err << "error: plan has " << ep.violations << " constraint violations\n";
      return RunFailed;
    }
    write_file(plan_out, planner::plan_to_json(ep.plan));
    note(io, Verbosity::Info, "wrote " + plan_out.string());
    return Ok;
  } catch (const planner::InfeasibleError& e) {
    io.err << "error: infeasible (" << planner::to_string(e.family()) << "): " << e.what() << '\n';
    return RunFailed;
  } catch (const std::exception& e) {
    io.err << "error: " << e.what() << '\n';
    return RunFailed;
  }
}

int cmd_plot(const fs::path& log_path, const fs::path& out_dir, const Streams& io)
{
  SimLog log;
  try {
    std::ifstream f(log_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + log_path.string());
    log = read_trajectories(f);
  } catch (const std::exception& e) {
    io.err << "error: " << log_path.string() << ": " << e.what() << '\n';
    return BadInput;
  }
  try {
    write_figures(log, out_dir);
    note(io, Verbosity::Info, "wrote charts to " + out_dir.string());
    return Ok;
  } catch (const std::exception& e) {
    io.err << "error: " << e.what() << '\n';
    return RunFailed;
  }
}

int cmd_validate(const fs::path& plan_path, const std::string& config_path, const Streams& io)
{
  ScenarioConfig cfg;
  planner::OccupancyPlan plan;
  try {
    cfg = load_config(config_path);
    plan = planner::plan_from_json(read_file(plan_path));
    cfg.horizon = plan.n_steps;
    cfg.duration = std::max(cfg.duration, cfg.horizon * cfg.dt_b);
    validate(cfg);
  } catch (const std::exception& e) {
    io.err << "error: " << e.what() << '\n';
    return BadInput;
  }
  try {
    const EpisodeRecord ep = plan_first_episode(cfg);
    if (plan.n_cav() != static_cast<int>(ep.init_cells.size())) {
      io.err << "error: plan has " << plan.n_cav() << " CAVs, scenario has " << ep.init_cells.size() << '\n';
      return RunFailed;
    }
    const auto violations = planner::validate_plan(plan, ep.grid, ep.forecast, ep.init_cells);
    for (const auto& v : violations) {
      io.out << planner::to_string(v.family) << ": cav" << v.cav << " step " << v.step;
      if (v.other >= 0) io.out << " other " << v.other;
      io.out << " cell (" << v.cell.row << "," << v.cell.col << ")\n";
    }
    io.out << violations.size() << " violations\n";
    return violations.empty() ? Ok : RunFailed;
  } catch (const std::exception& e) {
    io.err << "error: " << e.what() << '\n';
    return RunFailed;
  }
}

}  // namespace vswarm::cli
