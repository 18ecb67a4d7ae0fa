#include <iostream>

#include "CLI11.hpp"
#include "vswarm/cli/commands.hpp"

int main(int argc, char** argv)
{
  using namespace vswarm::cli;

  CLI::App app{"Cooperative CAV swarming simulator"};
  app.require_subcommand(1);

  RunManifest manifest;
  std::string mode = "both";
  bool no_logs = false, no_moes = false;
  auto* run = app.add_subcommand("run", "Run the closed-loop simulation and write logs and MOEs");
  run->add_option("--config", manifest.config_path, "Scenario JSON")->required();
  run->add_option("--out", manifest.out_dir, "Output directory")->required();
  run->add_option("--mode", mode, "swarm, baseline or both")
      ->check(CLI::IsMember({"swarm", "baseline", "both"}))
      ->capture_default_str();
  run->add_flag("--plots", manifest.plots, "Also write SVG charts under <out>/plots");
  run->add_flag("--no-logs", no_logs, "Skip trajectory, control and episode logs");
  run->add_flag("--no-moes", no_moes, "Skip moes.json");

  std::string plan_config;
  std::optional<int> horizon;
  std::string plan_out = "plan.json";
  auto* plan = app.add_subcommand("plan", "Solve the first planning episode and print the cell table");
  plan->add_option("--config", plan_config, "Scenario JSON")->required();
  plan->add_option("--horizon", horizon, "Override the planning horizon N")->check(CLI::PositiveNumber);
  plan->add_option("--out", plan_out, "Plan JSON output")->capture_default_str();

  std::string log_path, plot_out;
  auto* plot = app.add_subcommand("plot", "Draw SVG charts and tidy CSVs from a trajectories log");
  plot->add_option("--log", log_path, "trajectories.csv")->required();
  plot->add_option("--out", plot_out, "Output directory")->required();

  std::string plan_path, validate_config;
  auto* check = app.add_subcommand("validate", "Re-check a plan JSON against a scenario");
  check->add_option("--plan", plan_path, "Plan JSON")->required();
  check->add_option("--config", validate_config, "Scenario JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : BadInput;
  }

  const Streams io{std::cout, std::cerr, verbosity_from_env()};
  if (*run) {
    manifest.mode = run_mode_from_string(mode);
    manifest.logs = !no_logs;
    manifest.moes = !no_moes;
    return cmd_run(manifest, io);
  }
  if (*plan) return cmd_plan(plan_config, horizon, plan_out, io);
  if (*plot) return cmd_plot(log_path, plot_out, io);
  return cmd_validate(plan_path, validate_config, io);
}
