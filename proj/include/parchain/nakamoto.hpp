#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

#include "parchain/block.hpp"
#include "parchain/chainstore.hpp"
#include "parchain/hash_oracle.hpp"
#include "parchain/params.hpp"

/// Single-chain longest-path protocol used as the reference for k = 1.
namespace parchain::nakamoto {

struct Block {
  Bytes transactions;
  HashValue prev;
  Nonce nonce{};
  friend bool operator==(const Block&, const Block&) = default;
};
using BlockPtr = std::shared_ptr<const Block>;

Bytes serialize(const Block& block);
std::size_t serialized_size(const Block& block);
HashValue hash_block(const Block& block, unsigned lambda);
Block make_genesis(unsigned lambda);

/// Block tree with longest-path selection (ties to the smallest tip hash).
/// Exposes the same read interface as ChainStore with one chain, where
/// rank = height and next_rank = height + 1.
class Store {
 public:
  explicit Store(unsigned lambda, std::size_t pending_cap = ChainStore::kDefaultPendingCap);

  InsertResult insert(BlockPtr block, const HashValue& hash);

  std::uint32_t chain_count() const { return 1; }
  std::size_t size() const { return blocks_.size(); }
  std::size_t pending_size() const { return pending_index_.size(); }
  bool contains(const HashValue& h) const { return index_.count(h) != 0; }
  bool is_pending(const HashValue& h) const { return pending_index_.count(h) != 0; }
  std::optional<LocalId> find(const HashValue& h) const;

  const Block& block(LocalId id) const { return *blocks_[id].block; }
  const BlockPtr& block_ptr(LocalId id) const { return blocks_[id].block; }
  const HashValue& hash(LocalId id) const { return blocks_[id].hash; }
  LocalId parent(LocalId id) const { return blocks_[id].parent; }
  std::uint64_t height(LocalId id) const { return blocks_[id].height; }
  std::uint64_t rank(LocalId id) const { return blocks_[id].height; }
  std::uint64_t next_rank(LocalId id) const { return blocks_[id].height + 1; }
  std::uint32_t chain_of(LocalId) const { return 0; }
  LocalId tip(std::uint32_t = 0) const { return tip_; }

  std::vector<LocalId> longest_path() const;
  /// Longest path minus its last T blocks.
  std::vector<LocalId> confirmed(std::uint32_t T) const;

 private:
  struct Entry {
    BlockPtr block;
    HashValue hash;
    LocalId parent = kNoBlock;
    std::uint64_t height = 0;
  };
  struct Pending {
    BlockPtr block;
    HashValue hash;
  };

  LocalId store(BlockPtr block, const HashValue& hash, LocalId parent);

  std::size_t pending_cap_;
  std::vector<Entry> blocks_;
  std::unordered_map<HashValue, LocalId, HashValueHasher> index_;
  LocalId tip_ = 0;
  std::unordered_map<HashValue, std::vector<Pending>, HashValueHasher> waiters_;
  std::unordered_map<HashValue, HashValue, HashValueHasher> pending_index_;  // hash -> awaited prev
};

/// Verification and storage. PoW requires the leading-zero count for the
/// single-chain difficulty; params.k must be 1.
InsertResult process_block(Store& store, const Oracle& oracle, const ProtocolParams& params, BlockPtr block,
                           const HashValue& hash, std::size_t max_block_bytes = kDefaultMaxBlockBytes);

Block assemble_candidate(const Store& store, Bytes payload, const Nonce& nonce,
                         std::size_t max_block_bytes = kDefaultMaxBlockBytes);

}  // namespace parchain::nakamoto
