#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

namespace parchain::cli {

/// Environment variable naming the default output root.
inline constexpr const char* kOutputRootEnv = "PARCHAIN_OUTPUT_ROOT";

enum ExitCode : int {
  kOk = 0,
  kPropertyViolation = 1,
  kUsageError = 2,
};

struct RunOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> checkpoint_every;
  std::optional<std::uint64_t> ticks;
  std::optional<std::string> out_dir;
  unsigned gamma = 1;
};

struct AttackOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;
  std::optional<unsigned> threads;
  std::optional<std::string> out_dir;
};

struct SweepOptions {
  std::string campaign_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  unsigned jobs = 0;  // 0: hardware concurrency
  unsigned gamma = 1;
};

/// Output directory: the explicit one, else <root>/<default_name> where root
/// is $PARCHAIN_OUTPUT_ROOT or "runs".
std::filesystem::path resolve_out_dir(const std::optional<std::string>& explicit_dir, const std::string& default_name);

/// UTC time as 2024-01-02T03:04:05Z.
std::string utc_timestamp();

/// Runs one simulation and writes report.json, trace.csv and scb.jsonl.
/// Exit 0 iff no fatal property violation.
int cmd_run(const RunOptions& opts, std::ostream& out, std::ostream& err);
/// Prints the metrics summary of a report as JSON.
int cmd_metrics(const std::string& report_path, std::uint64_t window, std::ostream& out, std::ostream& err);
/// Prints all four property verdicts. Exit 0 iff consistency holds.
int cmd_check(const std::string& report_path, unsigned gamma, std::ostream& out, std::ostream& err);
/// Runs a balance-attack sweep and writes attack.csv.
int cmd_attack(const AttackOptions& opts, std::ostream& out, std::ostream& err);
/// Runs a campaign of simulations and writes one directory per run plus
/// summary.csv.
int cmd_sweep(const SweepOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace parchain::cli
