#ifndef VSWARM_CLI_COMMANDS_HPP
#define VSWARM_CLI_COMMANDS_HPP

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

namespace vswarm::cli {

/// Process exit codes shared by every command.
enum Exit : int { Ok = 0, RunFailed = 1, BadInput = 2 };

enum class Verbosity { Quiet, Info, Debug };

/// Reads VSWARM_LOG (quiet, info, debug); defaults to info.
Verbosity verbosity_from_env();

enum class RunMode { Swarm, Baseline, Both };

RunMode run_mode_from_string(const std::string& s);

struct RunManifest
{
  std::string config_path;
  std::filesystem::path out_dir;
  RunMode mode = RunMode::Both;
  bool logs = true;
  bool moes = true;
  bool plots = false;
};

struct Streams
{
  std::ostream& out;
  std::ostream& err;
  Verbosity verbosity = Verbosity::Info;
};

/// Swarm mode writes trajectories.csv, controls.csv, episodes.json and
/// moes.json. Baseline mode writes the same names for the baseline run. Both
/// mode writes the swarm files plus baseline_trajectories.csv and
/// baseline_controls.csv, and moes.json carries a comparison section.
/// Upstream reductions always use an extra run without CAVs.
int cmd_run(const RunManifest& manifest, const Streams& io);

/// One planning episode: prints the step table and writes the plan JSON.
int cmd_plan(const std::string& config_path, std::optional<int> horizon, const std::filesystem::path& plan_out,
             const Streams& io);

/// SVG charts and tidy CSVs from a trajectories log.
int cmd_plot(const std::filesystem::path& log_path, const std::filesystem::path& out_dir, const Streams& io);

/// Re-checks a plan JSON against the scenario's first planning episode.
int cmd_validate(const std::filesystem::path& plan_path, const std::string& config_path, const Streams& io);

}  // namespace vswarm::cli

#endif  // VSWARM_CLI_COMMANDS_HPP
