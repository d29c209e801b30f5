#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace parchain::conflux {

/// How many saved blocks the adversary releases to each partition at the end
/// of a round.
///   view_deficit: just enough for that partition to see its own branch
///     strictly heavier, given everything it has seen so far.
///   per_round: max(0, x_other - x_own + 1), counting only this round's
///     honest blocks.
enum class ReleaseRule { view_deficit, per_round };

std::string_view to_string(ReleaseRule r);
ReleaseRule release_rule_from_string(std::string_view s);

struct AttackConfig {
  std::uint32_t blocks_per_round = 20;
  double f = 0.2;
  std::uint32_t max_rounds = 200;
  std::uint64_t trials = 10000;
  std::uint64_t seed = 1;
  ReleaseRule rule = ReleaseRule::view_deficit;
  unsigned threads = 0;  // 0: hardware concurrency

  void validate() const;
};

struct TrialResult {
  std::uint32_t fork_length = 0;  // depth of the shorter branch when the attack ends
  std::uint32_t rounds = 0;       // rounds the two partitions stayed split
  bool capped = false;            // still alive at max_rounds
};

struct AttackResult {
  AttackConfig config;
  std::vector<TrialResult> trials;

  /// Nearest-rank empirical quantile of the fork length.
  std::uint32_t quantile(double q) const;
  double mean_fork_length() const;
  double capped_fraction() const;
};

/// One trial; its random stream depends only on (seed, trial).
TrialResult run_trial(const AttackConfig& config, std::uint64_t trial);

/// All trials, spread over a thread pool. Deterministic for any thread count.
AttackResult run_attack(const AttackConfig& config);

struct AttackSweep {
  AttackConfig base;
  std::vector<std::uint32_t> blocks_per_round{20, 200};
  std::vector<double> f{0.05, 0.10, 0.15, 0.20, 0.25, 0.30};
  std::vector<double> quantiles{0.95, 0.99};
};

std::vector<AttackResult> run_sweep(const AttackSweep& sweep);

/// Header blocks_per_round,f,quantile,fork_length; one row per result and
/// quantile.
void write_attack_csv(const std::vector<AttackResult>& results, const std::vector<double>& quantiles,
                      std::ostream& out);

/// Smallest f whose quantile reaches `length`, among results with the given
/// blocks_per_round; negative if none does.
double min_f_reaching(const std::vector<AttackResult>& results, std::uint32_t blocks_per_round, double q,
                      std::uint32_t length);

/// Reads a sweep from JSON: the base fields at top level; blocks_per_round
/// and f may be a number or a list.
AttackSweep attack_sweep_from_json(const nlohmann::json& j);
nlohmann::json to_json(const AttackConfig& c);

}  // namespace parchain::conflux
