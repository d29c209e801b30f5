#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "parchain/hash_value.hpp"
#include "parchain/simnet/config.hpp"

namespace parchain::simnet {

inline constexpr std::int32_t kAdversaryOrigin = -1;
inline constexpr std::int32_t kGenesisOrigin = -2;
inline constexpr std::uint32_t kNoId = std::numeric_limits<std::uint32_t>::max();

/// Ticks at which honest nodes reached some confirmation stage for a block.
struct ConfirmStats {
  std::uint32_t nodes = 0;
  std::uint64_t first = 0;
  std::uint64_t last = 0;
  std::uint64_t sum = 0;

  void add(std::uint64_t tick) {
    if (nodes == 0 || tick < first) first = tick;
    if (tick > last) last = tick;
    sum += tick;
    ++nodes;
  }
};

/// One block known to the run, indexed by a run-wide id. Genesis blocks
/// take ids 0 .. k-1.
struct BlockRecord {
  HashValue hash;
  std::int32_t origin = kGenesisOrigin;  // honest node id, or one of the constants above
  std::uint32_t chain = 0;
  std::uint32_t parent = kNoId;
  std::uint64_t height = 0;
  std::uint64_t mined_tick = 0;
  std::uint64_t published_tick = 0;
  std::uint32_t payload_bytes = 0;
  std::uint64_t rank = 0;
  std::uint64_t next_rank = 1;
  ConfirmStats partial;
  ConfirmStats full;

  bool honest() const { return origin >= 0; }
  bool genesis() const { return origin == kGenesisOrigin; }
};

/// Prefix tree of SCB sequences. Node 0 is the empty sequence; every other
/// node appends one block id to its parent's sequence.
class ScbTrie {
 public:
  ScbTrie();
  std::uint32_t child(std::uint32_t node, std::uint32_t block);
  std::uint32_t parent(std::uint32_t node) const { return parent_[node]; }
  std::uint32_t block(std::uint32_t node) const { return block_[node]; }
  std::uint32_t depth(std::uint32_t node) const { return depth_[node]; }
  std::size_t size() const { return parent_.size(); }
  std::vector<std::uint32_t> sequence(std::uint32_t node) const;

  /// Pre/post visit order, so `a` is a prefix of `b` iff
  /// enter[a] <= enter[b] && exit[b] <= exit[a].
  void euler(std::vector<std::uint32_t>& enter, std::vector<std::uint32_t>& exit) const;

 private:
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint32_t> block_;
  std::vector<std::uint32_t> depth_;
  std::unordered_map<std::uint64_t, std::uint32_t> edges_;
};

struct Snapshot {
  std::uint64_t tick = 0;
  std::uint32_t node = 0;
  std::uint32_t trie_node = 0;
  std::uint64_t confirm_bar = 1;
  std::vector<std::uint32_t> tips;  // per chain
};

/// Per-node state sampled every trace_every ticks.
struct TraceSample {
  std::uint64_t tick = 0;
  std::vector<std::uint32_t> tips;  // node-major: tips[node * k + chain]
  std::vector<std::uint64_t> confirm_bar;
  std::vector<std::uint64_t> scb_size;
  std::vector<std::uint64_t> scb_honest;
  std::vector<std::uint64_t> scb_payload;
};

/// Rank catch-up after one trailing-liar burst, judged on node 0's view.
struct RankBurst {
  std::uint64_t end_tick = 0;
  std::uint64_t reference_rank = 0;  // max next_rank known at burst end
  std::uint32_t lagging_chains = 0;  // tips below reference_rank - 1
  std::string outcome;               // no_lag | caught_up | violated | incomplete
  std::uint64_t resolved_tick = 0;
  std::uint64_t min_catchup_rank = 0;  // smallest next_rank among the first honest blocks
  std::uint64_t gap_at_end = 0;        // max - min tip next_rank at burst end
  std::uint64_t gap_after = 0;         // same, when resolved
};

struct RunCounters {
  std::uint64_t honest_blocks = 0;
  std::uint64_t adversary_blocks = 0;  // mined, including discarded and withheld
  std::uint64_t adversary_published = 0;
  std::uint64_t deliveries = 0;
  std::uint64_t attachment_mismatches = 0;
  std::uint64_t catchup_violations = 0;
  std::uint64_t confirm_bar_decreases = 0;
  std::uint64_t partial_reorgs = 0;
  std::uint64_t scb_rebuilds = 0;
  std::uint64_t tracker_mismatches = 0;
  std::uint64_t adversary_queries = 0;
  std::uint64_t max_adversary_queries_per_tick = 0;
  std::uint64_t max_honest_delay = 0;
  std::uint64_t pending_evicted = 0;
  std::map<std::string, std::uint64_t> rejected;
};

struct RunReport {
  SimConfig config;
  std::uint64_t honest_nodes = 0;
  std::uint64_t adversary_budget = 0;
  std::uint64_t growth_window = 0;
  std::uint64_t trace_every = 1;
  std::uint64_t checkpoint_every = 1;
  std::vector<BlockRecord> blocks;
  ScbTrie trie;
  std::vector<Snapshot> snapshots;
  std::vector<TraceSample> trace;
  std::vector<RankBurst> bursts;
  RunCounters counters;
  std::string generated_at;  // wall clock; excluded from comparisons

  std::uint32_t k() const { return config.params.k; }
  /// Block ids from genesis to `tip` along parent links.
  std::vector<std::uint32_t> path_to(std::uint32_t tip) const;
  /// Final snapshot of a node.
  const Snapshot& final_snapshot(std::uint32_t node) const;
  /// True iff no fatal property failure was recorded (consistency is
  /// checked separately).
  bool counters_clean() const {
    return counters.attachment_mismatches == 0 && counters.catchup_violations == 0 &&
           counters.tracker_mismatches == 0;
  }
};

nlohmann::json to_json(const RunReport& report);
RunReport report_from_json(const nlohmann::json& j);

/// tick, then per chain: node-0 tip height and tip next_rank; then per node:
/// confirm_bar and SCB size; then honest and adversary block counts mined
/// so far.
void write_trace_csv(const RunReport& report, std::ostream& out);
/// One JSON object per node-0 SCB entry at the end of the run.
void write_scb_jsonl(const RunReport& report, std::ostream& out);

}  // namespace parchain::simnet
