#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "parchain/hash_value.hpp"

namespace parchain {

/// Off-path digests for one leaf, ordered leaf to root.
struct MerkleProof {
  std::uint32_t leaf_index = 0;
  std::vector<HashValue> siblings;

  friend bool operator==(const MerkleProof&, const MerkleProof&) = default;
};

/// Interior node digest, domain-separated from block hashing.
HashValue merkle_parent(const HashValue& left, const HashValue& right);
/// Root of a one-leaf tree.
HashValue merkle_single_root(const HashValue& leaf);

/// Binary Merkle tree over the k chain-tip hashes. Leaves are padded with the
/// all-zero digest up to the next power of two; a single leaf is hashed once
/// to form the root.
class MerkleTree {
 public:
  MerkleTree() = default;

  /// Throws std::invalid_argument on an empty leaf list or mixed widths.
  static MerkleTree build(std::span<const HashValue> leaves);

  const HashValue& root() const { return root_; }
  std::size_t leaf_count() const { return leaf_count_; }
  const HashValue& leaf(std::size_t i) const;

  /// Throws std::out_of_range when i >= leaf_count().
  MerkleProof prove(std::uint32_t i) const;

  /// Replaces leaf i and recomputes the path to the root.
  void update_leaf(std::size_t i, const HashValue& leaf);

 private:
  void recompute_root();

  std::size_t leaf_count_ = 0;
  // levels_[0] holds the padded leaves; the last level has one node.
  std::vector<std::vector<HashValue>> levels_;
  HashValue root_;
};

/// True iff folding `leaf` with the proof's siblings (direction taken from the
/// bits of i) reproduces `root`. Malformed proofs yield false.
bool verify(const HashValue& root, std::uint32_t i, const HashValue& leaf, const MerkleProof& proof);

}  // namespace parchain
