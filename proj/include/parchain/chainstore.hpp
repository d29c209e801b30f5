#pragma once

#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "parchain/block.hpp"
#include "parchain/hash_value.hpp"
#include "parchain/merkle.hpp"

namespace parchain {

enum class Verdict { accepted, buffered, duplicate, rejected };

enum class Reason {
  none,
  bad_pow,
  bad_hash,
  bad_proof,
  oversize,
  wrong_chain_parent,  // leaf names a known block on another chain
  missing_parent,
  missing_trailing,
  duplicate,
};

std::string_view to_string(Verdict v);
std::string_view to_string(Reason r);

using LocalId = std::uint32_t;
inline constexpr LocalId kNoBlock = std::numeric_limits<LocalId>::max();

struct Ranks {
  std::uint64_t rank = 0;
  std::uint64_t next_rank = 1;
  friend bool operator==(const Ranks&, const Ranks&) = default;
};

/// rank comes from the parent; next_rank catches up to the trailing block
/// but always exceeds rank.
constexpr Ranks assign_ranks(std::uint64_t parent_next_rank, std::uint64_t trailing_next_rank) {
  Ranks r{parent_next_rank, trailing_next_rank};
  if (r.next_rank <= r.rank) r.next_rank = r.rank + 1;
  return r;
}

struct StoredBlock {
  BlockPtr block;
  Attachment attachment;  // rank and next_rank as computed locally
  std::uint32_t chain = 0;
  LocalId parent = kNoBlock;
  std::uint64_t height = 0;  // genesis is 0
};

struct InsertResult {
  Verdict verdict = Verdict::accepted;
  Reason reason = Reason::none;
  /// Blocks newly stored by this call in acceptance order: the inserted block
  /// first (when accepted), then anything its arrival unblocked.
  std::vector<LocalId> accepted;
  /// Buffered blocks that failed linking once unblocked.
  std::size_t cascade_rejected = 0;
};

/// One node's block store: the k block trees, their longest paths, the
/// trailing block, the Merkle tree over chain tips and the buffer of blocks
/// that arrived before a block they reference.
///
/// Longest-path ties go to the smallest tip hash. Trailing ties go to the
/// smallest chain id, then the smallest hash. Both rules depend only on the
/// set of stored blocks, so the final state does not depend on delivery order.
class ChainStore {
 public:
  static constexpr std::size_t kDefaultPendingCap = 100000;

  ChainStore(std::uint32_t k, unsigned lambda, std::size_t pending_cap = kDefaultPendingCap);

  /// Links a block whose stateless checks already passed. Rank values in
  /// `attachment` are ignored and recomputed.
  InsertResult insert(BlockPtr block, Attachment attachment);

  std::uint32_t chain_count() const { return k_; }
  unsigned lambda() const { return lambda_; }
  std::size_t size() const { return blocks_.size(); }
  std::size_t pending_size() const { return pending_alive_; }
  std::uint64_t evicted() const { return evicted_; }

  bool contains(const HashValue& h) const { return index_.count(h) != 0; }
  bool is_pending(const HashValue& h) const { return pending_index_.count(h) != 0; }
  std::optional<LocalId> find(const HashValue& h) const;

  const StoredBlock& at(LocalId id) const { return blocks_[id]; }
  const HashValue& hash(LocalId id) const { return blocks_[id].attachment.hash; }
  LocalId parent(LocalId id) const { return blocks_[id].parent; }
  std::uint64_t height(LocalId id) const { return blocks_[id].height; }
  std::uint64_t rank(LocalId id) const { return blocks_[id].attachment.rank; }
  std::uint64_t next_rank(LocalId id) const { return blocks_[id].attachment.next_rank; }
  std::uint32_t chain_of(LocalId id) const { return blocks_[id].chain; }

  LocalId genesis(std::uint32_t chain) const { return chain; }
  LocalId tip(std::uint32_t chain) const { return tips_[chain]; }

  /// Genesis-to-tip path of chain i.
  std::vector<LocalId> longest_path(std::uint32_t chain) const;
  /// Longest path without its last T blocks.
  std::vector<LocalId> partially_confirmed(std::uint32_t chain, std::uint32_t T) const;

  LocalId trailing() const { return trailing_; }
  const HashValue& trailing_hash() const { return hash(trailing_); }
  /// Trailing block recomputed by scanning every stored block.
  LocalId recompute_trailing() const;

  /// Merkle tree whose leaves are the chain tips in chain-id order.
  const MerkleTree& merkle() const;

  /// Debug dump: every stored (block, attachment) plus per-chain tips.
  nlohmann::json to_json() const;

 private:
  struct Pending {
    BlockPtr block;
    Attachment attachment;
    bool alive = true;
  };

  struct Link {
    Verdict verdict;
    Reason reason;
    HashValue waiting_on;
    LocalId id = kNoBlock;
  };

  Link try_link(const BlockPtr& block, const Attachment& attachment);
  LocalId store(const BlockPtr& block, const Attachment& attachment, std::uint32_t chain, LocalId parent);
  void buffer(BlockPtr block, Attachment attachment, const HashValue& waiting_on);
  void cascade(const HashValue& arrived, InsertResult& result);
  bool better_trailing(LocalId a, LocalId b) const;

  std::uint32_t k_;
  unsigned lambda_;
  std::size_t pending_cap_;

  std::vector<StoredBlock> blocks_;
  std::unordered_map<HashValue, LocalId, HashValueHasher> index_;
  std::vector<LocalId> tips_;
  LocalId trailing_ = 0;

  mutable MerkleTree merkle_;
  mutable std::vector<std::uint32_t> stale_leaves_;

  std::deque<Pending> pending_;
  std::uint64_t pending_front_seq_ = 0;
  std::size_t pending_alive_ = 0;
  std::uint64_t evicted_ = 0;
  std::unordered_map<HashValue, std::uint64_t, HashValueHasher> pending_index_;
  std::unordered_map<HashValue, std::vector<std::uint64_t>, HashValueHasher> waiters_;
};

}  // namespace parchain
