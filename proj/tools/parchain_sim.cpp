#include <iostream>

#include <CLI11.hpp>

#include "parchain/cli/commands.hpp"

using namespace parchain::cli;

int main(int argc, char** argv) {
  CLI::App app{"Parallel-chain consensus simulator and experiment harness"};
  app.require_subcommand(1);
  app.footer(std::string("Outputs go under $") + kOutputRootEnv + " (default ./runs) unless --out is given.");

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "Run one simulation and write report.json, trace.csv, scb.jsonl");
  run_cmd->add_option("config", run.config_path, "Simulation config (JSON)")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--seed", run.seed, "Override the config seed");
  run_cmd->add_option("--checkpoint-every", run.checkpoint_every, "Ticks between SCB snapshots");
  run_cmd->add_option("--ticks", run.ticks, "Override the run length");
  run_cmd->add_option("--out", run.out_dir, "Output directory");
  run_cmd->add_option("--gamma", run.gamma, "Quality-growth gamma")->check(CLI::PositiveNumber);

  std::string report_path;
  std::uint64_t window = 0;
  auto* metrics_cmd = app.add_subcommand("metrics", "Summarize throughput, decentralization and latency");
  metrics_cmd->add_option("report", report_path, "report.json")->required()->check(CLI::ExistingFile);
  metrics_cmd->add_option("--window", window, "Window in ticks (default: growth window)");

  unsigned gamma = 1;
  auto* check_cmd = app.add_subcommand("check", "Run the four property checkers on a report");
  check_cmd->add_option("report", report_path, "report.json")->required()->check(CLI::ExistingFile);
  check_cmd->add_option("--gamma", gamma, "Quality-growth gamma")->check(CLI::PositiveNumber);

  AttackOptions attack;
  auto* attack_cmd = app.add_subcommand("attack", "Balance-attack fork-length sweep, written as attack.csv");
  attack_cmd->add_option("config", attack.config_path, "Attack config (JSON)")->required()->check(CLI::ExistingFile);
  attack_cmd->add_option("--seed", attack.seed, "Override the seed");
  attack_cmd->add_option("--trials", attack.trials, "Trials per (blocks_per_round, f)");
  attack_cmd->add_option("--threads", attack.threads, "Worker threads");
  attack_cmd->add_option("--out", attack.out_dir, "Output directory");

  SweepOptions sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a campaign of simulations");
  sweep_cmd->add_option("campaign", sweep.campaign_path, "Campaign file (JSON)")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--seed", sweep.seed, "Campaign seed; each run derives its own");
  sweep_cmd->add_option("--out", sweep.out_dir, "Output directory");
  sweep_cmd->add_option("--jobs", sweep.jobs, "Parallel runs");
  sweep_cmd->add_option("--gamma", sweep.gamma, "Quality-growth gamma")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kUsageError;
  }

  if (*run_cmd) return cmd_run(run, std::cout, std::cerr);
  if (*metrics_cmd) return cmd_metrics(report_path, window, std::cout, std::cerr);
  if (*check_cmd) return cmd_check(report_path, gamma, std::cout, std::cerr);
  if (*attack_cmd) return cmd_attack(attack, std::cout, std::cerr);
  return cmd_sweep(sweep, std::cout, std::cerr);
}
