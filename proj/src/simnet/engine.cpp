#include "parchain/simnet/engine.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "parchain/scb_tracker.hpp"
#include "parchain/simnet/adversary.hpp"

namespace parchain::simnet {
namespace {

constexpr std::uint64_t kAdversaryTag = ~0ULL;

/// Miner id and sequence number up front keep every payload distinct.
Bytes payload_for(std::uint64_t who, std::uint64_t seq, std::size_t size) {
  Bytes out(size);
  for (std::size_t i = 0; i < size; ++i) {
    if (i < 8) {
      out[i] = static_cast<std::uint8_t>(who >> (8 * i));
    } else if (i < 16) {
      out[i] = static_cast<std::uint8_t>(seq >> (8 * (i - 8)));
    } else {
      out[i] = static_cast<std::uint8_t>(seq + i);
    }
  }
  return out;
}

Nonce random_nonce(Rng& rng) {
  std::uint64_t x = rng();
  Nonce n{};
  for (std::size_t i = 0; i < n.size(); ++i) n[i] = static_cast<std::uint8_t>(x >> (8 * i));
  return n;
}

template <class Node>
class Engine final : public AdversaryContext<Node> {
 public:
  using Message = typename Node::Message;
  using Candidate = typename Node::Candidate;
  using Solved = typename AdversaryContext<Node>::Solved;

  explicit Engine(const SimConfig& config)
      : config_(config),
        params_(config.params),
        oracle_(params_),
        honest_(config.honest_nodes()),
        budget_(config.adversary_budget()),
        trace_every_(config.trace_interval()),
        checkpoint_every_(config.checkpoint_interval()),
        adv_rng_(make_rng(config.seed, {2})) {
    for (std::uint64_t u = 0; u < honest_; ++u) {
      nodes_.emplace_back(params_, oracle_, config_.max_block_bytes, config_.pending_cap);
      rngs_.push_back(make_rng(config_.seed, {1, u}));
      trackers_.emplace_back(params_.T);
    }
    adversary_ = make_adversary<Node>(config_, Node(params_, oracle_, config_.max_block_bytes, config_.pending_cap));

    report_.config = config_;
    report_.honest_nodes = honest_;
    report_.adversary_budget = budget_;
    report_.growth_window = config_.growth_window();
    report_.trace_every = trace_every_;
    report_.checkpoint_every = checkpoint_every_;

    const std::uint32_t k = nodes_[0].chain_count();
    for (std::uint32_t i = 0; i < k; ++i) {
      BlockRecord rec;
      rec.hash = nodes_[0].hash(i);
      rec.chain = i;
      by_hash_.emplace(rec.hash, i);
      report_.blocks.push_back(rec);
      messages_.emplace_back(std::nullopt);
      attached_.push_back(1);
      broadcast_.push_back(1);
    }
    local_to_gid_.assign(honest_, {});
    for (auto& map : local_to_gid_) {
      for (std::uint32_t i = 0; i < k; ++i) map.push_back(i);
    }
    dirty_.assign(honest_, 1);
    scb_counted_.assign(honest_, 0);
    scb_honest_.assign(honest_, 0);
    scb_payload_.assign(honest_, 0);
    prev_seq_.assign(honest_, {});
    trie_path_.assign(honest_, std::vector<std::uint32_t>{0});
    honest_seq_.assign(honest_, 0);
  }

  RunReport run() {
    for (now_ = 0; now_ < config_.ticks; ++now_) {
      deliver();
      mine_honest();
      queries_left_ = budget_;
      adversary_->on_tick(*this);
      auto used = budget_ - queries_left_;
      queries_left_ = 0;
      report_.counters.max_adversary_queries_per_tick = std::max(report_.counters.max_adversary_queries_per_tick, used);
      end_of_tick();
    }
    if (pending_burst_) {
      pending_burst_->outcome = "incomplete";
      report_.bursts.push_back(*pending_burst_);
    }
    for (const auto& node : nodes_) report_.counters.pending_evicted += node.evicted();
    return std::move(report_);
  }

  // AdversaryContext
  std::uint64_t now() const override { return now_; }
  std::uint64_t delta() const override { return config_.delta; }
  std::size_t honest_count() const override { return honest_; }
  std::uint64_t queries_left() const override { return queries_left_; }
  Rng& rng() override { return adv_rng_; }

  std::optional<Solved> query(const std::function<Candidate()>& make) override {
    if (queries_left_ == 0) throw std::logic_error("adversary exceeded its query budget");
    --queries_left_;
    ++report_.counters.adversary_queries;
    std::optional<Solved> out;
    if (params_.mode == MiningMode::oracle) {
      auto h = oracle_mining_attempt(adv_rng_, params_);
      if (!h) return out;
      Candidate c = make();
      auto recorded = oracle_.program(nodes_[0].digest(c), *h);
      out = Solved{std::move(c), recorded};
    } else {
      Candidate c = make();
      auto dg = nodes_[0].digest(c);
      if (!is_pow_valid(dg, params_)) return out;
      out = Solved{std::move(c), dg};
    }
    ++report_.counters.adversary_blocks;
    adv_mined_.emplace(out->hash, now_);
    return out;
  }

  Bytes make_payload() override { return payload_for(kAdversaryTag, adv_seq_++, config_.payload_bytes); }
  Nonce make_nonce() override { return random_nonce(adv_rng_); }

  void publish(const Message& m, std::uint64_t at) override {
    auto gid = send_adversarial(m, at);
    broadcast_[gid] = 1;
    for (std::uint32_t r = 0; r < honest_; ++r) queue_[std::max(at, now_ + 1)].push_back({r, gid});
  }

  void inject(const Message& m, std::span<const std::size_t> recipients, std::uint64_t at) override {
    auto gid = send_adversarial(m, at);
    for (auto r : recipients) {
      if (r >= honest_) throw std::out_of_range("inject to a node that does not exist");
      queue_[std::max(at, now_ + 1)].push_back({static_cast<std::uint32_t>(r), gid});
    }
  }

 private:
  struct Event {
    std::uint32_t recipient;
    std::uint32_t gid;
  };

  std::uint32_t register_block(const Message& m, std::int32_t origin, std::uint64_t mined, std::uint64_t published) {
    const HashValue& h = Node::hash_of(m);
    auto it = by_hash_.find(h);
    if (it != by_hash_.end()) {
      auto& rec = report_.blocks[it->second];
      rec.published_tick = std::min(rec.published_tick, published);
      return it->second;
    }
    auto gid = static_cast<std::uint32_t>(report_.blocks.size());
    BlockRecord rec;
    rec.hash = h;
    rec.origin = origin;
    rec.chain = nodes_[0].chain_of(m);
    rec.mined_tick = mined;
    rec.published_tick = published;
    rec.payload_bytes = static_cast<std::uint32_t>(Node::payload_size(m));
    report_.blocks.push_back(rec);
    by_hash_.emplace(h, gid);
    messages_.emplace_back(m);
    attached_.push_back(0);
    broadcast_.push_back(0);
    if (origin == kAdversaryOrigin) ++report_.counters.adversary_published;
    return gid;
  }

  std::uint32_t send_adversarial(const Message& m, std::uint64_t at) {
    auto it = adv_mined_.find(Node::hash_of(m));
    std::uint64_t mined = it == adv_mined_.end() ? now_ : it->second;
    return register_block(m, kAdversaryOrigin, mined, std::max(at, now_ + 1));
  }

  void schedule_honest(std::uint32_t gid, std::uint32_t recipient) {
    auto d = adversary_->honest_delay(*messages_[gid], recipient, *this);
    if (d < 1 || d > config_.delta) {
      throw std::logic_error("adversary chose honest delay " + std::to_string(d) + " outside [1, delta]");
    }
    report_.counters.max_honest_delay = std::max(report_.counters.max_honest_delay, d);
    queue_[now_ + d].push_back({recipient, gid});
  }

  /// Maps blocks a node has newly stored to run-wide ids, checking that
  /// every node derives the same ranks for a block.
  void sync(std::uint32_t u) {
    auto& map = local_to_gid_[u];
    const auto& node = nodes_[u];
    while (map.size() < node.size()) {
      auto lid = static_cast<LocalId>(map.size());
      auto gid = by_hash_.at(node.hash(lid));
      map.push_back(gid);
      auto& rec = report_.blocks[gid];
      if (!attached_[gid]) {
        attached_[gid] = 1;
        rec.parent = map[node.parent(lid)];
        rec.height = node.height(lid);
        rec.rank = node.rank(lid);
        rec.next_rank = node.next_rank(lid);
        if (!broadcast_[gid]) {
          // An honest node forwards what it accepts, so an adversary block
          // handed to a few nodes still reaches everyone.
          broadcast_[gid] = 1;
          for (std::uint32_t r = 0; r < honest_; ++r) {
            if (r != u) schedule_honest(gid, r);
          }
        }
      } else if (rec.rank != node.rank(lid) || rec.next_rank != node.next_rank(lid)) {
        ++report_.counters.attachment_mismatches;
      }
      dirty_[u] = 1;
    }
  }

  void deliver() {
    while (!queue_.empty() && queue_.begin()->first <= now_) {
      auto events = std::move(queue_.begin()->second);
      queue_.erase(queue_.begin());
      for (const auto& e : events) {
        ++report_.counters.deliveries;
        auto res = nodes_[e.recipient].receive(*messages_[e.gid]);
        if (res.verdict == Verdict::rejected) ++report_.counters.rejected[std::string(to_string(res.reason))];
        if (res.cascade_rejected > 0) report_.counters.rejected["cascade"] += res.cascade_rejected;
        sync(e.recipient);
      }
    }
  }

  void mine_honest() {
    for (std::uint32_t u = 0; u < honest_; ++u) {
      auto& node = nodes_[u];
      auto& rng = rngs_[u];
      std::optional<Candidate> c;
      HashValue h;
      if (params_.mode == MiningMode::oracle) {
        auto solved = oracle_mining_attempt(rng, params_);
        if (!solved) continue;
        c = node.assemble(payload_for(u, honest_seq_[u]++, config_.payload_bytes), random_nonce(rng));
        h = oracle_.program(node.digest(*c), *solved);
      } else {
        c = node.assemble(payload_for(u, honest_seq_[u]++, config_.payload_bytes), random_nonce(rng));
        h = node.digest(*c);
        if (!is_pow_valid(h, params_)) continue;
      }
      const auto before = node.max_next_rank();
      auto m = node.seal(std::move(*c), h);
      auto gid = register_block(m, static_cast<std::int32_t>(u), now_, now_);
      sync(u);
      ++report_.counters.honest_blocks;
      if (report_.blocks[gid].next_rank < before) ++report_.counters.catchup_violations;
      adversary_->on_honest_block(m, *this);
      for (std::uint32_t r = 0; r < honest_; ++r) {
        if (r != u) schedule_honest(gid, r);
      }
    }
  }

  void end_of_tick() {
    for (std::uint32_t u = 0; u < honest_; ++u) {
      if (!dirty_[u]) continue;
      dirty_[u] = 0;
      refresh(u);
    }
    monitor_bursts();
    const bool last = now_ + 1 == config_.ticks;
    if (now_ % trace_every_ == 0 || last) sample_trace();
    if ((now_ + 1) % checkpoint_every_ == 0 || last) checkpoint(last);
  }

  void refresh(std::uint32_t u) {
    auto up = trackers_[u].refresh(nodes_[u]);
    const auto& map = local_to_gid_[u];
    for (auto lid : up.newly_partial) report_.blocks[map[lid]].partial.add(now_);
    for (auto lid : up.newly_full) report_.blocks[map[lid]].full.add(now_);
    auto& c = report_.counters;
    if (up.rebuilt) ++c.scb_rebuilds;
    if (up.bar_decreased) ++c.confirm_bar_decreases;
    c.partial_reorgs += up.partial_reorgs;

    const auto& scb = trackers_[u].scb();
    if (up.rebuilt) {
      scb_counted_[u] = 0;
      scb_honest_[u] = 0;
      scb_payload_[u] = 0;
    }
    for (std::size_t j = scb_counted_[u]; j < scb.size(); ++j) {
      const auto& rec = report_.blocks[map[scb[j]]];
      if (rec.honest()) ++scb_honest_[u];
      scb_payload_[u] += rec.payload_bytes;
    }
    scb_counted_[u] = scb.size();
  }

  void sample_trace() {
    TraceSample s;
    s.tick = now_;
    const std::uint32_t k = nodes_[0].chain_count();
    for (std::uint32_t u = 0; u < honest_; ++u) {
      for (std::uint32_t i = 0; i < k; ++i) s.tips.push_back(local_to_gid_[u][nodes_[u].tip(i)]);
      s.confirm_bar.push_back(trackers_[u].confirm_bar());
      s.scb_size.push_back(trackers_[u].scb().size());
      s.scb_honest.push_back(scb_honest_[u]);
      s.scb_payload.push_back(scb_payload_[u]);
    }
    report_.trace.push_back(std::move(s));
  }

  void checkpoint(bool last) {
    const std::uint32_t k = nodes_[0].chain_count();
    for (std::uint32_t u = 0; u < honest_; ++u) {
      const auto& scb = trackers_[u].scb();
      const auto& map = local_to_gid_[u];
      auto& prev = prev_seq_[u];
      auto& path = trie_path_[u];
      std::size_t common = 0;
      while (common < prev.size() && common < scb.size() && prev[common] == map[scb[common]]) ++common;
      prev.resize(common);
      path.resize(common + 1);
      for (std::size_t j = common; j < scb.size(); ++j) {
        auto gid = map[scb[j]];
        prev.push_back(gid);
        path.push_back(report_.trie.child(path.back(), gid));
      }
      Snapshot snap;
      snap.tick = now_;
      snap.node = u;
      snap.trie_node = path.back();
      snap.confirm_bar = trackers_[u].confirm_bar();
      for (std::uint32_t i = 0; i < k; ++i) snap.tips.push_back(map[nodes_[u].tip(i)]);
      report_.snapshots.push_back(std::move(snap));
      if (last && nodes_[u].scb(params_.T) != scb) ++report_.counters.tracker_mismatches;
    }
  }

  std::pair<std::uint64_t, std::uint64_t> tip_rank_range(const Node& node) const {
    std::uint64_t lo = ~0ULL;
    std::uint64_t hi = 0;
    for (std::uint32_t i = 0; i < node.chain_count(); ++i) {
      auto nr = node.next_rank(node.tip(i));
      lo = std::min(lo, nr);
      hi = std::max(hi, nr);
    }
    return {lo, hi};
  }

  /// Follows rank catch-up on node 0 after each attack burst. A lagging
  /// chain is settled by the first honest block on its path mined at least
  /// delta ticks after the burst, when every honest miner has seen what node
  /// 0 saw at the burst's end.
  void monitor_bursts() {
    auto active = adversary_->burst_active(now_);
    if (!active) return;
    const auto& node = nodes_[0];
    if (*active && !burst_was_active_ && pending_burst_) {
      pending_burst_->outcome = "incomplete";
      report_.bursts.push_back(*pending_burst_);
      pending_burst_.reset();
    }
    if (!*active && burst_was_active_) {
      RankBurst b;
      b.end_tick = now_;
      b.reference_rank = node.max_next_rank();
      auto [lo, hi] = tip_rank_range(node);
      b.gap_at_end = hi - lo;
      lagging_.clear();
      for (std::uint32_t i = 0; i < node.chain_count(); ++i) {
        if (node.next_rank(node.tip(i)) + 1 < b.reference_rank) lagging_.push_back(i);
      }
      b.lagging_chains = static_cast<std::uint32_t>(lagging_.size());
      if (lagging_.empty()) {
        b.outcome = "no_lag";
        b.resolved_tick = now_;
        b.gap_after = b.gap_at_end;
        report_.bursts.push_back(b);
      } else {
        b.min_catchup_rank = ~0ULL;
        pending_burst_ = b;
      }
    }
    burst_was_active_ = *active;
    if (*active || !pending_burst_) return;

    auto& b = *pending_burst_;
    const std::uint64_t threshold = b.end_tick + config_.delta;
    const auto& map = local_to_gid_[0];
    std::vector<std::uint32_t> still;
    for (auto c : lagging_) {
      std::optional<std::uint32_t> first;
      for (LocalId x = node.tip(c); x != kNoBlock; x = node.parent(x)) {
        const auto& rec = report_.blocks[map[x]];
        if (rec.genesis() || rec.mined_tick < threshold) break;
        if (rec.honest()) first = map[x];
      }
      if (first) {
        b.min_catchup_rank = std::min(b.min_catchup_rank, report_.blocks[*first].next_rank);
      } else {
        still.push_back(c);
      }
    }
    lagging_ = std::move(still);
    if (!lagging_.empty()) return;
    b.outcome = b.min_catchup_rank + 1 >= b.reference_rank ? "caught_up" : "violated";
    b.resolved_tick = now_;
    auto [lo, hi] = tip_rank_range(node);
    b.gap_after = hi - lo;
    report_.bursts.push_back(b);
    pending_burst_.reset();
  }

  SimConfig config_;
  ProtocolParams params_;
  Oracle oracle_;
  std::uint64_t honest_;
  std::uint64_t budget_;
  std::uint64_t trace_every_;
  std::uint64_t checkpoint_every_;
  Rng adv_rng_;

  std::vector<Node> nodes_;
  std::vector<Rng> rngs_;
  std::vector<ScbTracker<Node>> trackers_;
  std::unique_ptr<Adversary<Node>> adversary_;

  std::uint64_t now_ = 0;
  std::uint64_t queries_left_ = 0;
  std::uint64_t adv_seq_ = 0;
  std::vector<std::uint64_t> honest_seq_;
  std::map<std::uint64_t, std::vector<Event>> queue_;

  RunReport report_;
  std::vector<std::optional<Message>> messages_;  // by run-wide id; empty for genesis
  std::vector<std::uint8_t> attached_;
  std::vector<std::uint8_t> broadcast_;
  std::unordered_map<HashValue, std::uint32_t, HashValueHasher> by_hash_;
  std::unordered_map<HashValue, std::uint64_t, HashValueHasher> adv_mined_;
  std::vector<std::vector<std::uint32_t>> local_to_gid_;
  std::vector<std::uint8_t> dirty_;

  std::vector<std::size_t> scb_counted_;
  std::vector<std::uint64_t> scb_honest_;
  std::vector<std::uint64_t> scb_payload_;
  std::vector<std::vector<std::uint32_t>> prev_seq_;
  std::vector<std::vector<std::uint32_t>> trie_path_;

  bool burst_was_active_ = false;
  std::optional<RankBurst> pending_burst_;
  std::vector<std::uint32_t> lagging_;
};

template <class Node>
RunReport run_with(const SimConfig& config) {
  auto engine = std::make_unique<Engine<Node>>(config);
  return engine->run();
}

}  // namespace

RunReport run(const SimConfig& config) {
  config.validate();
  if (config.protocol == Protocol::nakamoto) return run_with<NakamotoNode>(config);
  return run_with<ParallelNode>(config);
}

}  // namespace parchain::simnet
