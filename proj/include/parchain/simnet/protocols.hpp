#pragma once

#include <cstdint>
#include <vector>

#include "parchain/chainstore.hpp"
#include "parchain/consensus.hpp"
#include "parchain/hash_oracle.hpp"
#include "parchain/nakamoto.hpp"

namespace parchain::simnet {

/// The simulator drives either protocol through the same node interface:
///   Candidate assemble(payload, nonce); HashValue digest(candidate);
///   Message seal(candidate, hash); InsertResult receive(message);
/// plus the read-only view used by ScbTracker.

struct ParallelMessage {
  BlockPtr block;
  Attachment attachment;
};

class ParallelNode {
 public:
  using Candidate = parchain::Block;
  using Message = ParallelMessage;
  static constexpr bool kParallel = true;

  ParallelNode(const ProtocolParams& params, const Oracle& oracle, std::size_t max_block_bytes, std::size_t pending_cap)
      : params_(&params), oracle_(&oracle), max_block_bytes_(max_block_bytes), store_(params.k, params.lambda, pending_cap) {}

  Candidate assemble(Bytes payload, const Nonce& nonce) const {
    return assemble_candidate(store_, std::move(payload), nonce, max_block_bytes_);
  }
  HashValue digest(const Candidate& c) const { return hash_block(c, params_->lambda); }
  Message seal(Candidate c, const HashValue& h) {
    auto mined = on_mining_success(store_, *oracle_, *params_, std::move(c), h, max_block_bytes_);
    return {std::move(mined.block), std::move(mined.attachment)};
  }
  InsertResult receive(const Message& m) {
    return process_block(store_, *oracle_, *params_, m.block, m.attachment, max_block_bytes_);
  }

  static const HashValue& hash_of(const Message& m) { return m.attachment.hash; }
  std::uint32_t chain_of(const Message& m) const { return chain_index(m.attachment.hash, params_->k); }
  /// Parent first, then the trailing block.
  static std::vector<HashValue> references(const Message& m) { return {m.attachment.leaf, m.block->trailing}; }
  static std::size_t payload_size(const Message& m) { return m.block->transactions.size(); }

  bool knows(const HashValue& h) const { return store_.contains(h) || store_.is_pending(h); }
  std::uint32_t chain_count() const { return store_.chain_count(); }
  std::size_t size() const { return store_.size(); }
  LocalId tip(std::uint32_t i) const { return store_.tip(i); }
  LocalId parent(LocalId id) const { return store_.parent(id); }
  std::uint64_t height(LocalId id) const { return store_.height(id); }
  std::uint64_t rank(LocalId id) const { return store_.rank(id); }
  std::uint64_t next_rank(LocalId id) const { return store_.next_rank(id); }
  const HashValue& hash(LocalId id) const { return store_.hash(id); }
  std::uint64_t max_next_rank() const { return store_.next_rank(store_.trailing()); }
  std::uint64_t evicted() const { return store_.evicted(); }

  /// SCB recomputed from scratch.
  std::vector<LocalId> scb(std::uint32_t T) const {
    std::vector<LocalId> out;
    for (const auto& e : output_scb(store_, T)) out.push_back(*store_.find(e.block_hash));
    return out;
  }

  const ChainStore& store() const { return store_; }
  const HashValue& genesis_hash(std::uint32_t chain) const { return store_.hash(store_.genesis(chain)); }

 private:
  const ProtocolParams* params_;
  const Oracle* oracle_;
  std::size_t max_block_bytes_;
  ChainStore store_;
};

struct NakamotoMessage {
  nakamoto::BlockPtr block;
  HashValue hash;
};

class NakamotoNode {
 public:
  using Candidate = nakamoto::Block;
  using Message = NakamotoMessage;
  static constexpr bool kParallel = false;

  NakamotoNode(const ProtocolParams& params, const Oracle& oracle, std::size_t max_block_bytes, std::size_t pending_cap)
      : params_(&params), oracle_(&oracle), max_block_bytes_(max_block_bytes), store_(params.lambda, pending_cap) {}

  Candidate assemble(Bytes payload, const Nonce& nonce) const {
    return nakamoto::assemble_candidate(store_, std::move(payload), nonce, max_block_bytes_);
  }
  HashValue digest(const Candidate& c) const { return nakamoto::hash_block(c, params_->lambda); }
  Message seal(Candidate c, const HashValue& h);
  InsertResult receive(const Message& m) {
    return nakamoto::process_block(store_, *oracle_, *params_, m.block, m.hash, max_block_bytes_);
  }

  static const HashValue& hash_of(const Message& m) { return m.hash; }
  std::uint32_t chain_of(const Message&) const { return 0; }
  static std::vector<HashValue> references(const Message& m) { return {m.block->prev}; }
  static std::size_t payload_size(const Message& m) { return m.block->transactions.size(); }

  bool knows(const HashValue& h) const { return store_.contains(h) || store_.is_pending(h); }
  std::uint32_t chain_count() const { return 1; }
  std::size_t size() const { return store_.size(); }
  LocalId tip(std::uint32_t = 0) const { return store_.tip(); }
  LocalId parent(LocalId id) const { return store_.parent(id); }
  std::uint64_t height(LocalId id) const { return store_.height(id); }
  std::uint64_t rank(LocalId id) const { return store_.rank(id); }
  std::uint64_t next_rank(LocalId id) const { return store_.next_rank(id); }
  const HashValue& hash(LocalId id) const { return store_.hash(id); }
  std::uint64_t max_next_rank() const { return store_.next_rank(store_.tip()); }
  std::uint64_t evicted() const { return 0; }

  std::vector<LocalId> scb(std::uint32_t T) const { return store_.confirmed(T); }

  const nakamoto::Store& store() const { return store_; }

 private:
  const ProtocolParams* params_;
  const Oracle* oracle_;
  std::size_t max_block_bytes_;
  nakamoto::Store store_;
};

}  // namespace parchain::simnet
