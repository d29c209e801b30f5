#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "parchain/hash_value.hpp"
#include "parchain/merkle.hpp"

namespace parchain {

using Bytes = std::vector<std::uint8_t>;
using Nonce = std::array<std::uint8_t, 8>;

/// Upper bound on a serialized block, sized after the 20 KB blocks used in
/// the deployed system.
inline constexpr std::size_t kDefaultMaxBlockBytes = 20 * 1024;

/// The mined unit. Every field is an input to the proof-of-work hash.
struct Block {
  Bytes transactions;
  HashValue root;      // Merkle root over the miner's k chain tips
  HashValue trailing;  // hash of the miner's trailing block
  Nonce nonce{};

  friend bool operator==(const Block&, const Block&) = default;
};

using BlockPtr = std::shared_ptr<const Block>;

/// Post-mining metadata carried next to a block. Not hashed; receivers
/// recompute rank and next_rank locally.
struct Attachment {
  HashValue hash;
  HashValue leaf;  // hash of the parent tip on the block's chain
  MerkleProof leaf_proof;
  std::uint64_t rank = 0;
  std::uint64_t next_rank = 1;
};

/// Domain separation bytes for the hash family.
namespace domain {
inline constexpr std::uint8_t block = 0x00;
inline constexpr std::uint8_t merkle = 0x01;
inline constexpr std::uint8_t nakamoto_block = 0x02;
}  // namespace domain

/// Canonical encoding: domain byte, then each field as a little-endian u64
/// length followed by its bytes, in the order transactions, root, trailing,
/// nonce.
Bytes serialize(const Block& block);

std::size_t serialized_size(const Block& block);

/// Genesis block of chain `chain` for hash width `lambda`.
Block make_genesis(std::uint32_t chain, unsigned lambda);

void append_u64le(Bytes& out, std::uint64_t v);
void append_field(Bytes& out, std::span<const std::uint8_t> field);

}  // namespace parchain
