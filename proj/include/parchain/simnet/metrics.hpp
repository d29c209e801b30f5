#pragma once

#include <cstdint>

#include <json.hpp>

#include "parchain/simnet/report.hpp"

namespace parchain::simnet {

struct LatencyStats {
  std::uint64_t samples = 0;
  double mean = 0.0;
  double median = 0.0;
};

/// Summary numbers of one run, all measured on node 0's final SCB unless
/// noted.
struct Metrics {
  std::uint64_t ticks = 0;
  std::uint64_t window_ticks = 0;
  std::uint64_t confirmed_blocks = 0;  // genesis excluded
  std::uint64_t confirmed_payload_bytes = 0;
  double throughput = 0.0;            // payload bytes per tick
  double confirmed_per_tick = 0.0;    // decentralization factor
  double block_interval = 0.0;        // per-chain ticks between blocks, 1 / (p n)
  double confirmed_per_interval = 0.0;
  double confirmed_per_window = 0.0;  // mean over whole windows
  /// Ticks from mining to confirmation, averaged over honest nodes, for
  /// blocks mined in the first latency_cutoff of the run that every honest
  /// node confirmed.
  LatencyStats partial_latency;
  LatencyStats full_latency;
  double latency_cutoff = 0.75;
  double distinct_proposers_per_window = 0.0;  // the adversary counts as one proposer
};

/// window_ticks = 0 uses the run's growth window.
Metrics compute_metrics(const RunReport& report, std::uint64_t window_ticks = 0);

nlohmann::json to_json(const Metrics& m);

}  // namespace parchain::simnet
