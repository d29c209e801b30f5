#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>

#include "parchain/block.hpp"
#include "parchain/hash_value.hpp"
#include "parchain/params.hpp"
#include "parchain/rng.hpp"

namespace parchain {

/// SHA-256 of `data`, truncated to `bits` (a multiple of 8, at most 256).
HashValue sha256_truncated(std::span<const std::uint8_t> data, unsigned bits);

/// Digest of the canonical serialization.
HashValue hash_block(const Block& block, unsigned lambda);

/// First difficulty() bits of h are zero.
bool is_pow_valid(const HashValue& h, const ProtocolParams& params);

/// Chain selected by a hash: the last 48 bits as an unsigned integer, mod k.
std::uint32_t chain_index(const HashValue& h, std::uint32_t k);

/// Uniform hash conditioned on passing the PoW check, with its chain
/// selector encoding a uniformly drawn chain.
HashValue synthesize_valid_hash(Rng& rng, const ProtocolParams& params);

/// Oracle-mode query: succeeds with probability k*p, returning a synthesized
/// valid hash. Throws ConfigError in real_hash mode.
std::optional<HashValue> oracle_mining_attempt(Rng& rng, const ProtocolParams& params);

/// Real-hash query on a filled-in candidate: its digest if valid.
std::optional<HashValue> real_mining_attempt(const Block& candidate, const ProtocolParams& params);

/// The random oracle H1 shared by every simulated party. In real_hash mode it
/// is the block digest itself. In oracle mode outputs of successful queries
/// are sampled by the miner and recorded against the block digest, so
/// verification is a table lookup.
class Oracle {
 public:
  explicit Oracle(const ProtocolParams& params);

  MiningMode mode() const { return mode_; }
  unsigned lambda() const { return lambda_; }

  /// Records h as the oracle output for content digest `digest`. Content that
  /// was already queried keeps its first output; returns the recorded value.
  HashValue program(const HashValue& digest, const HashValue& h);
  std::optional<HashValue> lookup(const HashValue& digest) const;
  /// True iff h is the oracle output for content with digest `digest`.
  bool verify(const HashValue& digest, const HashValue& h) const;

  std::size_t programmed() const { return table_.size(); }

 private:
  MiningMode mode_;
  unsigned lambda_;
  std::unordered_map<HashValue, HashValue, HashValueHasher> table_;
};

}  // namespace parchain
