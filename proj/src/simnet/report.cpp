#include "parchain/simnet/report.hpp"

#include <algorithm>
#include <stdexcept>

namespace parchain::simnet {

using nlohmann::json;

ScbTrie::ScbTrie() : parent_{kNoId}, block_{kNoId}, depth_{0} {}

std::uint32_t ScbTrie::child(std::uint32_t node, std::uint32_t block) {
  std::uint64_t key = (static_cast<std::uint64_t>(node) << 32) | block;
  auto [it, fresh] = edges_.try_emplace(key, static_cast<std::uint32_t>(parent_.size()));
  if (fresh) {
    parent_.push_back(node);
    block_.push_back(block);
    depth_.push_back(depth_[node] + 1);
  }
  return it->second;
}

std::vector<std::uint32_t> ScbTrie::sequence(std::uint32_t node) const {
  std::vector<std::uint32_t> out(depth_[node]);
  for (std::uint32_t x = node; x != 0; x = parent_[x]) out[depth_[x] - 1] = block_[x];
  return out;
}

void ScbTrie::euler(std::vector<std::uint32_t>& enter, std::vector<std::uint32_t>& exit) const {
  const std::size_t n = parent_.size();
  std::vector<std::uint32_t> first_child(n, kNoId);
  std::vector<std::uint32_t> next_sibling(n, kNoId);
  for (std::size_t v = n; v-- > 1;) {
    next_sibling[v] = first_child[parent_[v]];
    first_child[parent_[v]] = static_cast<std::uint32_t>(v);
  }
  enter.assign(n, 0);
  exit.assign(n, 0);
  std::uint32_t clock = 0;
  std::vector<std::uint32_t> stack{0};
  enter[0] = clock++;
  std::vector<std::uint32_t> cursor(first_child);
  while (!stack.empty()) {
    std::uint32_t v = stack.back();
    std::uint32_t c = cursor[v];
    if (c == kNoId) {
      exit[v] = clock++;
      stack.pop_back();
      continue;
    }
    cursor[v] = next_sibling[c];
    enter[c] = clock++;
    stack.push_back(c);
  }
}

std::vector<std::uint32_t> RunReport::path_to(std::uint32_t tip) const {
  std::vector<std::uint32_t> out;
  for (std::uint32_t x = tip; x != kNoId; x = blocks[x].parent) out.push_back(x);
  std::reverse(out.begin(), out.end());
  return out;
}

const Snapshot& RunReport::final_snapshot(std::uint32_t node) const {
  for (auto it = snapshots.rbegin(); it != snapshots.rend(); ++it) {
    if (it->node == node) return *it;
  }
  throw std::out_of_range("no snapshot for node " + std::to_string(node));
}

namespace {

json stats_json(const ConfirmStats& s) { return json::array({s.nodes, s.first, s.last, s.sum}); }

ConfirmStats stats_from(const json& j) {
  return {j.at(0).get<std::uint32_t>(), j.at(1).get<std::uint64_t>(), j.at(2).get<std::uint64_t>(),
          j.at(3).get<std::uint64_t>()};
}

HashValue hash_from(const json& j) {
  auto h = HashValue::from_hex(j.get<std::string>());
  if (!h) throw std::invalid_argument("bad hash in report");
  return *h;
}

}  // namespace

json to_json(const RunReport& r) {
  json blocks = json::array();
  for (const auto& b : r.blocks) {
    blocks.push_back({
        {"hash", b.hash.hex()},
        {"origin", b.origin},
        {"chain", b.chain},
        {"parent", b.parent == kNoId ? json(nullptr) : json(b.parent)},
        {"height", b.height},
        {"mined_tick", b.mined_tick},
        {"published_tick", b.published_tick},
        {"payload_bytes", b.payload_bytes},
        {"rank", b.rank},
        {"next_rank", b.next_rank},
        {"partial", stats_json(b.partial)},
        {"full", stats_json(b.full)},
    });
  }
  json trie_parent = json::array();
  json trie_block = json::array();
  for (std::uint32_t v = 1; v < r.trie.size(); ++v) {
    trie_parent.push_back(r.trie.parent(v));
    trie_block.push_back(r.trie.block(v));
  }
  json snapshots = json::array();
  for (const auto& s : r.snapshots) {
    snapshots.push_back({{"tick", s.tick}, {"node", s.node}, {"trie_node", s.trie_node},
                         {"confirm_bar", s.confirm_bar}, {"tips", s.tips}});
  }
  json trace = json::array();
  for (const auto& t : r.trace) {
    trace.push_back({{"tick", t.tick},
                     {"tips", t.tips},
                     {"confirm_bar", t.confirm_bar},
                     {"scb_size", t.scb_size},
                     {"scb_honest", t.scb_honest},
                     {"scb_payload", t.scb_payload}});
  }
  json bursts = json::array();
  for (const auto& b : r.bursts) {
    bursts.push_back({{"end_tick", b.end_tick},
                      {"reference_rank", b.reference_rank},
                      {"lagging_chains", b.lagging_chains},
                      {"outcome", b.outcome},
                      {"resolved_tick", b.resolved_tick},
                      {"min_catchup_rank", b.min_catchup_rank},
                      {"gap_at_end", b.gap_at_end},
                      {"gap_after", b.gap_after}});
  }
  const auto& c = r.counters;
  json counters = {
      {"honest_blocks", c.honest_blocks},
      {"adversary_blocks", c.adversary_blocks},
      {"adversary_published", c.adversary_published},
      {"deliveries", c.deliveries},
      {"attachment_mismatches", c.attachment_mismatches},
      {"catchup_violations", c.catchup_violations},
      {"confirm_bar_decreases", c.confirm_bar_decreases},
      {"partial_reorgs", c.partial_reorgs},
      {"scb_rebuilds", c.scb_rebuilds},
      {"tracker_mismatches", c.tracker_mismatches},
      {"adversary_queries", c.adversary_queries},
      {"max_adversary_queries_per_tick", c.max_adversary_queries_per_tick},
      {"max_honest_delay", c.max_honest_delay},
      {"pending_evicted", c.pending_evicted},
      {"rejected", c.rejected},
  };
  return {
      {"generated_at", r.generated_at},
      {"config", to_json(r.config)},
      {"honest_nodes", r.honest_nodes},
      {"adversary_budget", r.adversary_budget},
      {"growth_window", r.growth_window},
      {"trace_every", r.trace_every},
      {"checkpoint_every", r.checkpoint_every},
      {"counters", std::move(counters)},
      {"bursts", std::move(bursts)},
      {"blocks", std::move(blocks)},
      {"scb_trie", {{"parent", std::move(trie_parent)}, {"block", std::move(trie_block)}}},
      {"snapshots", std::move(snapshots)},
      {"trace", std::move(trace)},
  };
}

RunReport report_from_json(const json& j) {
  RunReport r;
  r.generated_at = j.value("generated_at", "");
  r.config = sim_config_from_json(j.at("config"));
  r.honest_nodes = j.at("honest_nodes").get<std::uint64_t>();
  r.adversary_budget = j.at("adversary_budget").get<std::uint64_t>();
  r.growth_window = j.at("growth_window").get<std::uint64_t>();
  r.trace_every = j.at("trace_every").get<std::uint64_t>();
  r.checkpoint_every = j.at("checkpoint_every").get<std::uint64_t>();

  const auto& c = j.at("counters");
  auto& rc = r.counters;
  rc.honest_blocks = c.at("honest_blocks");
  rc.adversary_blocks = c.at("adversary_blocks");
  rc.adversary_published = c.at("adversary_published");
  rc.deliveries = c.at("deliveries");
  rc.attachment_mismatches = c.at("attachment_mismatches");
  rc.catchup_violations = c.at("catchup_violations");
  rc.confirm_bar_decreases = c.at("confirm_bar_decreases");
  rc.partial_reorgs = c.at("partial_reorgs");
  rc.scb_rebuilds = c.at("scb_rebuilds");
  rc.tracker_mismatches = c.at("tracker_mismatches");
  rc.adversary_queries = c.at("adversary_queries");
  rc.max_adversary_queries_per_tick = c.at("max_adversary_queries_per_tick");
  rc.max_honest_delay = c.at("max_honest_delay");
  rc.pending_evicted = c.at("pending_evicted");
  rc.rejected = c.at("rejected").get<std::map<std::string, std::uint64_t>>();

  for (const auto& b : j.at("bursts")) {
    RankBurst x;
    x.end_tick = b.at("end_tick");
    x.reference_rank = b.at("reference_rank");
    x.lagging_chains = b.at("lagging_chains");
    x.outcome = b.at("outcome");
    x.resolved_tick = b.at("resolved_tick");
    x.min_catchup_rank = b.at("min_catchup_rank");
    x.gap_at_end = b.at("gap_at_end");
    x.gap_after = b.at("gap_after");
    r.bursts.push_back(std::move(x));
  }
  for (const auto& b : j.at("blocks")) {
    BlockRecord x;
    x.hash = hash_from(b.at("hash"));
    x.origin = b.at("origin");
    x.chain = b.at("chain");
    x.parent = b.at("parent").is_null() ? kNoId : b.at("parent").get<std::uint32_t>();
    x.height = b.at("height");
    x.mined_tick = b.at("mined_tick");
    x.published_tick = b.at("published_tick");
    x.payload_bytes = b.at("payload_bytes");
    x.rank = b.at("rank");
    x.next_rank = b.at("next_rank");
    x.partial = stats_from(b.at("partial"));
    x.full = stats_from(b.at("full"));
    r.blocks.push_back(std::move(x));
  }
  const auto& trie = j.at("scb_trie");
  const auto& tp = trie.at("parent");
  const auto& tb = trie.at("block");
  for (std::size_t v = 0; v < tp.size(); ++v) {
    auto node = r.trie.child(tp.at(v).get<std::uint32_t>(), tb.at(v).get<std::uint32_t>());
    if (node != v + 1) throw std::invalid_argument("scb trie in report is not in creation order");
  }
  for (const auto& s : j.at("snapshots")) {
    Snapshot x;
    x.tick = s.at("tick");
    x.node = s.at("node");
    x.trie_node = s.at("trie_node");
    x.confirm_bar = s.at("confirm_bar");
    x.tips = s.at("tips").get<std::vector<std::uint32_t>>();
    r.snapshots.push_back(std::move(x));
  }
  for (const auto& t : j.at("trace")) {
    TraceSample x;
    x.tick = t.at("tick");
    x.tips = t.at("tips").get<std::vector<std::uint32_t>>();
    x.confirm_bar = t.at("confirm_bar").get<std::vector<std::uint64_t>>();
    x.scb_size = t.at("scb_size").get<std::vector<std::uint64_t>>();
    x.scb_honest = t.at("scb_honest").get<std::vector<std::uint64_t>>();
    x.scb_payload = t.at("scb_payload").get<std::vector<std::uint64_t>>();
    r.trace.push_back(std::move(x));
  }
  return r;
}

void write_trace_csv(const RunReport& r, std::ostream& out) {
  const std::uint32_t k = r.k();
  const std::uint64_t nodes = r.honest_nodes;
  out << "tick";
  for (std::uint32_t i = 0; i < k; ++i) out << ",chain" << i << "_length,chain" << i << "_tip_next_rank";
  for (std::uint64_t u = 0; u < nodes; ++u) out << ",node" << u << "_confirm_bar,node" << u << "_scb_size";
  out << ",honest_blocks,adversary_blocks\n";

  // Blocks sorted by mined tick give the running honest/adversary counts.
  std::vector<std::pair<std::uint64_t, bool>> mined;
  for (const auto& b : r.blocks) {
    if (!b.genesis()) mined.emplace_back(b.mined_tick, b.honest());
  }
  std::sort(mined.begin(), mined.end());
  std::size_t cursor = 0;
  std::uint64_t honest = 0;
  std::uint64_t adversary = 0;
  for (const auto& t : r.trace) {
    while (cursor < mined.size() && mined[cursor].first <= t.tick) {
      (mined[cursor].second ? honest : adversary) += 1;
      ++cursor;
    }
    out << t.tick;
    for (std::uint32_t i = 0; i < k; ++i) {
      const auto& tip = r.blocks[t.tips[i]];
      out << ',' << tip.height + 1 << ',' << tip.next_rank;
    }
    for (std::uint64_t u = 0; u < nodes; ++u) out << ',' << t.confirm_bar[u] << ',' << t.scb_size[u];
    out << ',' << honest << ',' << adversary << '\n';
  }
}

void write_scb_jsonl(const RunReport& r, std::ostream& out) {
  const auto& snap = r.final_snapshot(0);
  for (auto id : r.trie.sequence(snap.trie_node)) {
    const auto& b = r.blocks[id];
    json line = {{"block_hash", b.hash.hex()},
                 {"rank", b.rank},
                 {"chain_id", b.chain},
                 {"origin", b.honest() ? json(b.origin) : json(b.genesis() ? "genesis" : "adversary")},
                 {"full_confirm_tick", b.full.nodes > 0 ? json(b.full.first) : json(nullptr)}};
    out << line.dump() << '\n';
  }
}

}  // namespace parchain::simnet
