#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "parchain/rng.hpp"
#include "parchain/simnet/config.hpp"
#include "parchain/simnet/protocols.hpp"

namespace parchain::simnet {

/// What the engine lets an adversary do. Mining goes through query(), which
/// charges the per-tick budget; there is no other way to obtain a valid hash.
template <class Node>
class AdversaryContext {
 public:
  using Candidate = typename Node::Candidate;
  using Message = typename Node::Message;

  struct Solved {
    Candidate candidate;
    HashValue hash;
  };

  virtual ~AdversaryContext() = default;

  virtual std::uint64_t now() const = 0;
  virtual std::uint64_t delta() const = 0;
  virtual std::size_t honest_count() const = 0;
  virtual std::uint64_t queries_left() const = 0;
  virtual Rng& rng() = 0;

  /// One oracle query. `make` builds the candidate; in oracle mode it only
  /// runs when the query succeeds.
  virtual std::optional<Solved> query(const std::function<Candidate()>& make) = 0;
  virtual Bytes make_payload() = 0;
  virtual Nonce make_nonce() = 0;

  /// Sends an adversary block to every honest node, arriving at tick `at`
  /// (at least now + 1).
  virtual void publish(const Message& m, std::uint64_t at) = 0;
  virtual void inject(const Message& m, std::span<const std::size_t> recipients, std::uint64_t at) = 0;
};

template <class Node>
class Adversary {
 public:
  using Context = AdversaryContext<Node>;
  using Message = typename Node::Message;

  explicit Adversary(Node view) : view_(std::move(view)) {}
  virtual ~Adversary() = default;

  virtual std::string_view name() const = 0;

  /// Delay in [1, delta] for delivering an honest-relayed message to one
  /// recipient. The engine rejects anything outside that range.
  virtual std::uint64_t honest_delay(const Message&, std::size_t /*recipient*/, Context& ctx) { return ctx.delta(); }

  /// Called as soon as an honest node sends a block.
  virtual void on_honest_block(const Message& m, Context&) { view_.receive(m); }

  /// Spends the tick's query budget.
  virtual void on_tick(Context& ctx) = 0;

  /// For strategies that attack in bursts: whether tick t is inside one.
  virtual std::optional<bool> burst_active(std::uint64_t) const { return std::nullopt; }

  const Node& view() const { return view_; }

 protected:
  /// Mines one candidate on the adversary's own view, honestly assembled.
  std::optional<typename Context::Solved> mine_honestly(Context& ctx) {
    return ctx.query([&] { return view_.assemble(ctx.make_payload(), ctx.make_nonce()); });
  }

  Node view_;
};

/// Delivers everything at exactly send + delta and mines honestly, publishing
/// each block immediately.
template <class Node>
class HonestShadow : public Adversary<Node> {
 public:
  using Adversary<Node>::Adversary;
  std::string_view name() const override { return "honest_shadow"; }

  void on_tick(typename Adversary<Node>::Context& ctx) override {
    while (ctx.queries_left() > 0) {
      auto solved = this->mine_honestly(ctx);
      if (!solved) continue;
      auto m = this->view_.seal(std::move(solved->candidate), solved->hash);
      ctx.publish(m, ctx.now() + 1);
    }
  }
};

/// Mines privately on its own longest paths. When an honest block appears on
/// a chain, it releases its withheld blocks of that chain together with any
/// withheld blocks they reference, racing the honest block.
template <class Node>
class Withholder : public Adversary<Node> {
 public:
  using Base = Adversary<Node>;
  using Message = typename Node::Message;
  using Base::Base;
  std::string_view name() const override { return "withholder"; }

  void on_honest_block(const Message& m, typename Base::Context& ctx) override {
    this->view_.receive(m);
    release_chain(this->view_.chain_of(m), ctx);
  }

  void on_tick(typename Base::Context& ctx) override {
    while (ctx.queries_left() > 0) {
      auto solved = this->mine_honestly(ctx);
      if (!solved) continue;
      auto m = this->view_.seal(std::move(solved->candidate), solved->hash);
      withheld_hashes_.insert(Node::hash_of(m));
      withheld_.push_back(std::move(m));
    }
  }

  std::size_t withheld() const { return withheld_.size(); }

 private:
  void release_chain(std::uint32_t chain, typename Base::Context& ctx) {
    if (withheld_.empty()) return;
    // Marks every target block and, transitively, the withheld blocks it
    // needs. Blocks are kept in mining order, so references come first and a
    // reverse sweep closes the set.
    std::unordered_set<HashValue, HashValueHasher> needed;
    for (auto it = withheld_.rbegin(); it != withheld_.rend(); ++it) {
      const HashValue& h = Node::hash_of(*it);
      if (this->view_.chain_of(*it) != chain && !needed.count(h)) continue;
      needed.insert(h);
      for (const auto& r : Node::references(*it)) {
        if (withheld_hashes_.count(r)) needed.insert(r);
      }
    }
    if (needed.empty()) return;
    std::vector<Message> keep;
    for (auto& m : withheld_) {
      if (needed.count(Node::hash_of(m))) {
        ctx.publish(m, ctx.now() + 1);
        withheld_hashes_.erase(Node::hash_of(m));
      } else {
        keep.push_back(std::move(m));
      }
    }
    withheld_ = std::move(keep);
  }

  std::vector<Message> withheld_;
  std::unordered_set<HashValue, HashValueHasher> withheld_hashes_;
};

/// Alternates attack bursts with honest pauses. During a burst every block
/// it mines claims genesis-0 as its trailing block, so its next_rank only
/// moves one past its rank.
class TrailingLiar : public Adversary<ParallelNode> {
 public:
  TrailingLiar(ParallelNode view, std::uint64_t burst_ticks, std::uint64_t pause_ticks);
  std::string_view name() const override { return "trailing_liar"; }
  void on_tick(Context& ctx) override;
  std::optional<bool> burst_active(std::uint64_t t) const override;

 private:
  std::uint64_t burst_ticks_;
  std::uint64_t pause_ticks_;
};

/// Spends the whole budget but only keeps blocks that land on the target
/// chain, publishing them at once. chain_index decides where a block lands,
/// so the rest of the successes are thrown away.
class ChainFocus : public Adversary<ParallelNode> {
 public:
  ChainFocus(ParallelNode view, std::uint32_t target);
  std::string_view name() const override { return "chain_focus"; }
  void on_tick(Context& ctx) override;
  std::uint32_t target() const { return target_; }

 private:
  std::uint32_t target_;
};

/// Builds the configured strategy. Throws ConfigError for an unknown name or
/// one that needs parallel chains when run against the single-chain protocol.
template <class Node>
std::unique_ptr<Adversary<Node>> make_adversary(const SimConfig& config, Node view);

}  // namespace parchain::simnet
