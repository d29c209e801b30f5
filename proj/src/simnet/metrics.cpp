#include "parchain/simnet/metrics.hpp"

#include <algorithm>
#include <set>

namespace parchain::simnet {

using nlohmann::json;

namespace {

LatencyStats summarize(std::vector<double> xs) {
  LatencyStats s;
  s.samples = xs.size();
  if (xs.empty()) return s;
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(xs.size());
  std::sort(xs.begin(), xs.end());
  const std::size_t mid = xs.size() / 2;
  s.median = xs.size() % 2 ? xs[mid] : 0.5 * (xs[mid - 1] + xs[mid]);
  return s;
}

double mean_latency(const ConfirmStats& c, std::uint64_t mined) {
  return static_cast<double>(c.sum) / c.nodes - static_cast<double>(mined);
}

}  // namespace

Metrics compute_metrics(const RunReport& r, std::uint64_t window_ticks) {
  Metrics m;
  m.ticks = r.config.ticks;
  m.window_ticks = window_ticks > 0 ? window_ticks : std::max<std::uint64_t>(1, r.growth_window);
  const auto& cfg = r.config;
  m.block_interval = 1.0 / (cfg.params.p * static_cast<double>(cfg.n));

  const auto scb = r.trie.sequence(r.final_snapshot(0).trie_node);
  const auto cutoff = static_cast<std::uint64_t>(m.latency_cutoff * static_cast<double>(m.ticks));
  const std::uint64_t windows = cutoff / m.window_ticks;
  std::vector<std::uint64_t> per_window(windows, 0);
  std::vector<std::set<std::int32_t>> proposers(windows);
  for (auto g : scb) {
    const auto& b = r.blocks[g];
    if (b.genesis()) continue;
    ++m.confirmed_blocks;
    m.confirmed_payload_bytes += b.payload_bytes;
    auto w = b.mined_tick / m.window_ticks;
    if (w < windows) {
      ++per_window[w];
      proposers[w].insert(b.origin);
    }
  }
  m.throughput = static_cast<double>(m.confirmed_payload_bytes) / static_cast<double>(m.ticks);
  m.confirmed_per_tick = static_cast<double>(m.confirmed_blocks) / static_cast<double>(m.ticks);
  m.confirmed_per_interval = m.confirmed_per_tick * m.block_interval;
  if (windows > 0) {
    double blocks = 0.0;
    double distinct = 0.0;
    for (std::uint64_t w = 0; w < windows; ++w) {
      blocks += static_cast<double>(per_window[w]);
      distinct += static_cast<double>(proposers[w].size());
    }
    m.confirmed_per_window = blocks / static_cast<double>(windows);
    m.distinct_proposers_per_window = distinct / static_cast<double>(windows);
  }

  std::vector<double> partial;
  std::vector<double> full;
  for (const auto& b : r.blocks) {
    if (b.genesis() || b.mined_tick >= cutoff) continue;
    if (b.partial.nodes == r.honest_nodes) partial.push_back(mean_latency(b.partial, b.mined_tick));
    if (b.full.nodes == r.honest_nodes) full.push_back(mean_latency(b.full, b.mined_tick));
  }
  m.partial_latency = summarize(std::move(partial));
  m.full_latency = summarize(std::move(full));
  return m;
}

json to_json(const Metrics& m) {
  auto lat = [](const LatencyStats& s) { return json{{"samples", s.samples}, {"mean", s.mean}, {"median", s.median}}; };
  return {
      {"ticks", m.ticks},
      {"window_ticks", m.window_ticks},
      {"confirmed_blocks", m.confirmed_blocks},
      {"confirmed_payload_bytes", m.confirmed_payload_bytes},
      {"throughput_bytes_per_tick", m.throughput},
      {"confirmed_blocks_per_tick", m.confirmed_per_tick},
      {"block_interval_ticks", m.block_interval},
      {"confirmed_blocks_per_interval", m.confirmed_per_interval},
      {"confirmed_blocks_per_window", m.confirmed_per_window},
      {"partial_confirm_latency", lat(m.partial_latency)},
      {"full_confirm_latency", lat(m.full_latency)},
      {"latency_cutoff", m.latency_cutoff},
      {"distinct_proposers_per_window", m.distinct_proposers_per_window},
  };
}

}  // namespace parchain::simnet
