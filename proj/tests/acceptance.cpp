// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Usage: acceptance [scenario.json]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "json.hpp"
#include "support/lqr_oracle.hpp"
#include "support/planner_oracle.hpp"
#include "vswarm/cli/commands.hpp"
#include "vswarm/planner/solver.hpp"
#include "vswarm/planner/validate.hpp"
#include "vswarm/sim/simulation.hpp"
#include "vswarm/tracker/tracking.hpp"

namespace fs = std::filesystem;
using namespace vswarm;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& title, const std::string& detail)
{
  std::cout << (ok ? "PASS" : "FAIL") << " criterion " << id << ": " << title << " | " << detail << std::endl;
  if (!ok) ++failures;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v, int digits = 3)
{
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << v;
  return os.str();
}

std::string slurp(const fs::path& p)
{
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// Oracle suite shared by criteria 1 and 2.
struct OracleOutcome
{
  int instances = 0;
  int feasible = 0;
  int mismatches = 0;
  int violations = 0;
  double seconds = 0.0;
};

OracleOutcome run_oracle_suite(int count)
{
  OracleOutcome o;
  std::mt19937_64 rng(20240601);
  const auto t0 = Clock::now();
  for (int n = 0; n < count; ++n) {
    const auto inst = oracle::random_instance(rng, 2, 4, 3, 4);
    const auto scene = oracle::scene_of(inst);
    const auto truth = oracle::enumerate_optimum(scene);
    ++o.instances;
    try {
      const auto plan = planner::solve(planner::build_program(scene));
      if (!truth.best || plan.objective_value != *truth.best) ++o.mismatches;
      ++o.feasible;
      o.violations += static_cast<int>(planner::validate_plan(scene, plan).size());
    } catch (const planner::InfeasibleError&) {
      if (truth.best) ++o.mismatches;
    }
  }
  o.seconds = seconds_since(t0);
  return o;
}

// First step from which every CAV stays in l_index ahead of the front HV.
std::optional<int> overtake_step(const sim::EpisodeRecord& ep, int l_index)
{
  if (!ep.forecast.front_hv) return std::nullopt;
  std::optional<int> done;
  for (int k = ep.plan.n_steps; k >= 1; --k) {
    const auto front = ep.forecast.cell(*ep.forecast.front_hv, k);
    bool ok = true;
    for (int i = 1; i <= ep.plan.n_cav(); ++i) {
      const auto c = ep.plan.at(i, k);
      if (c.col != l_index || (front && c.row <= front->row)) ok = false;
    }
    if (!ok) break;
    done = k;
  }
  return done;
}

void criterion_3(const sim::ScenarioConfig& cfg)
{
  const auto t0 = Clock::now();
  const auto ep = sim::plan_first_episode(cfg);
  const auto step = overtake_step(ep, cfg.weights.l_index);
  bool final_lane = true;
  for (int i = 1; i <= ep.plan.n_cav(); ++i) final_lane = final_lane && ep.plan.at(i, ep.plan.n_steps).col == cfg.weights.l_index;
  const bool ok = step && *step <= 15 && ep.blocking.size() >= 2 && final_lane;
  report(3, ok, "first episode overtakes within 15 steps with >= 2 blocking CAVs, regrouped in l_index",
         "overtake complete at step " + (step ? std::to_string(*step) : std::string("never")) + " of " +
             std::to_string(ep.plan.n_steps) + ", blocking assignments " + std::to_string(ep.blocking.size()) +
             ", all in column " + std::to_string(cfg.weights.l_index) + " at N: " + (final_lane ? "yes" : "no") +
             ", solve " + fmt(seconds_since(t0), 2) + " s");
}

void criteria_4_to_6(const json& moes, double run_seconds, bool run_ok)
{
  if (!run_ok) {
    report(4, false, "mobility uplift 12.04 +- 3 pp", "paired run failed");
    report(5, false, "CAV following distance", "paired run failed");
    report(6, false, "upstream impact", "paired run failed");
    return;
  }
  const auto& sw = moes.at("swarm");
  const double uplift = moes.at("comparison").at("uplift_pct").get<double>();
  report(4, std::abs(uplift - 12.04) <= 3.0 && run_seconds < 120.0,
         "swarming platoon speed exceeds baseline by 12.04% +- 3 pp; paired run < 2 min",
         "swarm " + fmt(moes.at("comparison").at("swarm_avg_speed").get<double>()) + " m/s, baseline " +
             fmt(moes.at("comparison").at("baseline_avg_speed").get<double>()) + " m/s, uplift " + fmt(uplift, 2) +
             "%, run " + fmt(run_seconds, 1) + " s");

  const auto& f = sw.at("following");
  const double avg = f.at("avg").get<double>(), mn = f.at("min").get<double>();
  report(5, f.at("samples").get<int>() > 0 && mn >= 5.0 && avg >= 16.80 * 0.75 && avg <= 16.80 * 1.25,
         "min CAV following distance >= 5 m, average within 16.80 m +- 25%",
         "min " + fmt(mn, 2) + " m, avg " + fmt(avg, 2) + " m (band " + fmt(16.8 * 0.75, 2) + ".." +
             fmt(16.8 * 1.25, 2) + ")");

  const auto& up = sw.at("upstream");
  const auto red = up.at("reduction_pct_by_index").get<std::vector<double>>();
  bool decreasing = red.size() >= 5;
  for (std::size_t i = 1; i < red.size(); ++i) decreasing = decreasing && red[i] < red[i - 1];
  // Every stream on its own must also decay.
  std::map<std::string, std::vector<double>> per_stream;
  for (const auto& v : up.at("vehicles"))
    if (!v.at("reduction_pct").is_null() && v.at("stream") != "front")
      per_stream[v.at("stream").get<std::string>()].push_back(v.at("reduction_pct").get<double>());
  for (const auto& [name, r] : per_stream)
    for (std::size_t i = 1; i < r.size(); ++i) decreasing = decreasing && r[i] < r[i - 1];
  const bool have_headway = !up.at("min_gap_headway").is_null();
  const double headway = have_headway ? up.at("min_gap_headway").get<double>() : 0.0;
  const bool ok = decreasing && red.size() >= 5 && red[0] <= 4.0 && red[4] < 0.5 && have_headway && headway >= 1.2;
  std::string list;
  for (double r : red) list += (list.empty() ? "" : ", ") + fmt(r, 3);
  report(6, ok, "upstream reduction strictly decreasing, first <= 4%, fifth < 0.5%, min headway >= 1.2 s",
         "reduction % by index [" + list + "], per stream decreasing: " + (decreasing ? "yes" : "no") +
             ", min gap " + (up.at("min_gap").is_null() ? std::string("n/a") : fmt(up.at("min_gap").get<double>(), 2)) +
             " m at " + fmt(up.at("min_gap_speed").get<double>(), 2) + " m/s -> " + fmt(headway, 2) + " s");
}

void criterion_7()
{
  std::mt19937_64 rng(7);
  int agree = 0;
  const int n = 150;
  for (int i = 0; i < n; ++i)
    if (oracle::agrees_with_qp(oracle::random_lqr(rng))) ++agree;

  // Lateral zero case: straight reference, zero initial error.
  const auto straight = build_reference_path({{0, 0, 0}, {3, 60, 0}, {6, 120, 0}});
  const auto zp = tracker::build_lat_problem({0, 0}, straight, 0.0, tracker::LatParams{}, 400);
  const auto zs = tracker::lqr_solve(zp);
  bool zero = true;
  for (const auto& u : zs.U) zero = zero && u(0) == 0.0;

  // Clamped solutions on random longitudinal and lane-change problems.
  int bound_breaks = 0, clamped_cases = 0;
  std::uniform_real_distribution<double> speed(0.0, 33.0), target(-5.0, 45.0), w(0.01, 50.0), lane(-6.0, 6.0);
  for (int i = 0; i < 100; ++i) {
    tracker::LonParams lp;
    lp.q_s = w(rng);
    lp.q_v = w(rng);
    lp.r = w(rng) / 10;
    const double vt = std::max(0.5, target(rng));
    const auto ref = build_reference_path({{0, 0, 0}, {3, 3 * vt, 0}, {6, 6 * vt, 0}});
    const auto p = tracker::build_lon_problem({target(rng), speed(rng)}, ref, 0.0, lp, 300);
    const auto raw = tracker::lqr_solve(p);
    const auto c = tracker::clamp_controls(raw, p);
    if (c.U != raw.U) ++clamped_cases;
    for (const auto& u : c.U) bound_breaks += u(0) < lp.a_min || u(0) > lp.a_max;
    for (const auto& x : c.X) bound_breaks += x(1) < lp.v_min - 1e-9 || x(1) > lp.v_max + 1e-9;
  }
  for (int i = 0; i < 50; ++i) {
    tracker::LatParams lp;
    lp.q_l = w(rng);
    lp.q_phi = w(rng);
    lp.r = w(rng) / 100;
    const double dy = lane(rng), len = 20.0 + std::abs(lane(rng)) * 10.0;
    const auto ref = build_reference_path({{0, 0, 0}, {3, len, dy}, {6, 2 * len, dy}});
    const int K = static_cast<int>(ref.samples().back().sigma / lp.ds) + 40;
    const auto p = tracker::build_lat_problem({lane(rng) / 4, 0.0}, ref, 0.0, lp, K);
    const auto raw = tracker::lqr_solve(p);
    const auto c = tracker::clamp_controls(raw, p);
    if (c.U != raw.U) ++clamped_cases;
    for (const auto& u : c.U) bound_breaks += std::abs(u(0)) > lp.steer_max;
  }

  report(7, agree == n && zero && bound_breaks == 0,
         "DP matches dense QP, lateral zero case steers exactly 0, clamped controls respect bounds",
         std::to_string(agree) + "/" + std::to_string(n) + " random problems agree (rel 1e-8 cost, 1e-6 controls), zero case " +
             (zero ? "exact" : "nonzero") + ", " + std::to_string(bound_breaks) + " bound violations over 150 clamped runs (" +
             std::to_string(clamped_cases) + " needed clipping)");
}

bool same_tree(const fs::path& a, const fs::path& b, int& files, std::string& first_diff)
{
  std::vector<fs::path> ra, rb;
  for (const auto& e : fs::recursive_directory_iterator(a))
    if (e.is_regular_file()) ra.push_back(fs::relative(e.path(), a));
  for (const auto& e : fs::recursive_directory_iterator(b))
    if (e.is_regular_file()) rb.push_back(fs::relative(e.path(), b));
  std::sort(ra.begin(), ra.end());
  std::sort(rb.begin(), rb.end());
  files = static_cast<int>(ra.size());
  if (ra != rb) {
    first_diff = "file lists differ";
    return false;
  }
  for (const auto& r : ra)
    if (slurp(a / r) != slurp(b / r)) {
      first_diff = r.string();
      return false;
    }
  return true;
}

}  // namespace

int main(int argc, char** argv)
{
  const std::string scenario = argc > 1 ? argv[1] : std::string(VSWARM_SOURCE_DIR) + "/scenarios/overtake.json";
  const auto cfg = sim::load_config(scenario);

  const OracleOutcome oc = run_oracle_suite(240);
  report(1, oc.instances >= 200 && oc.mismatches == 0 && oc.seconds < 60.0,
         "branch-and-bound equals exhaustive enumeration on >= 200 tiny instances in < 60 s",
         std::to_string(oc.instances) + " instances (" + std::to_string(oc.feasible) + " feasible), " +
             std::to_string(oc.mismatches) + " mismatches, " + fmt(oc.seconds, 2) + " s");

  // Criterion 2 also covers every episode the closed loop solves.
  const auto swarm = sim::run_scenario(cfg, sim::Controller::Swarming);
  int scenario_violations = 0;
  for (const auto& ep : swarm.episodes) {
    const auto direct = planner::validate_plan(ep.plan, ep.grid, ep.forecast, ep.init_cells);
    scenario_violations += ep.violations + static_cast<int>(direct.size());
  }
  report(2, oc.violations == 0 && scenario_violations == 0 && !swarm.episodes.empty(),
         "every solver plan passes validate_plan",
         std::to_string(oc.feasible) + " oracle plans with " + std::to_string(oc.violations) + " violations; " +
             std::to_string(swarm.episodes.size()) + " scenario episodes with " +
             std::to_string(scenario_violations) + " violations" +
             (swarm.aborted ? " (run aborted: " + swarm.abort_reason + ")" : ""));

  criterion_3(cfg);

  const fs::path root = fs::temp_directory_path() / "vswarm_acceptance";
  fs::remove_all(root);
  std::ostringstream sink_out, sink_err;
  const cli::Streams quiet{sink_out, sink_err, cli::Verbosity::Quiet};
  cli::RunManifest first{scenario, root / "run1", cli::RunMode::Both};
  first.plots = true;
  cli::RunManifest second = first;
  second.out_dir = root / "run2";

  auto t0 = Clock::now();
  const int rc1 = cli::cmd_run(first, quiet);
  const double run_seconds = seconds_since(t0);
  json moes;
  if (rc1 == 0) moes = json::parse(slurp(first.out_dir / "moes.json"));
  criteria_4_to_6(moes, run_seconds, rc1 == 0);

  criterion_7();

  const int rc2 = cli::cmd_run(second, quiet);
  int files = 0;
  std::string diff;
  const bool same = rc1 == 0 && rc2 == 0 && same_tree(first.out_dir, second.out_dir, files, diff);
  report(8, same, "two identical cmd_run invocations produce byte-identical outputs",
         rc1 != 0 || rc2 != 0 ? "run failed: " + sink_err.str()
                              : std::to_string(files) + " files compared" + (same ? ", all identical" : ", first difference: " + diff));
  fs::remove_all(root);

  std::cout << (failures == 0 ? "ALL CRITERIA PASS" : std::to_string(failures) + " CRITERIA FAIL") << std::endl;
  return failures == 0 ? 0 : 1;
}
