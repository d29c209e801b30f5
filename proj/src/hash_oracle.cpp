#include "parchain/hash_oracle.hpp"

#include <openssl/sha.h>

#include <array>

namespace parchain {

HashValue sha256_truncated(std::span<const std::uint8_t> data, unsigned bits) {
  std::array<std::uint8_t, SHA256_DIGEST_LENGTH> digest{};
  SHA256(data.data(), data.size(), digest.data());
  return HashValue::from_bytes(digest, bits);
}

HashValue hash_block(const Block& block, unsigned lambda) {
  return sha256_truncated(serialize(block), lambda);
}

bool is_pow_valid(const HashValue& h, const ProtocolParams& params) {
  return h.leading_zero_bits() >= params.difficulty();
}

std::uint32_t chain_index(const HashValue& h, std::uint32_t k) {
  if (k <= 1) return 0;
  auto bytes = h.bytes();
  std::uint64_t x = 0;
  for (std::size_t i = bytes.size() - kChainSelectorBits / 8; i < bytes.size(); ++i) x = (x << 8) | bytes[i];
  return static_cast<std::uint32_t>(x % k);
}

HashValue synthesize_valid_hash(Rng& rng, const ProtocolParams& params) {
  HashValue h(params.lambda);
  auto bytes = h.mutable_bytes();
  for (std::size_t i = 0; i < bytes.size(); i += 8) {
    std::uint64_t word = rng();
    for (std::size_t j = 0; j < 8 && i + j < bytes.size(); ++j) {
      bytes[i + j] = static_cast<std::uint8_t>(word >> (8 * j));
    }
  }
  unsigned d = params.difficulty();
  for (unsigned b = 0; b < d; ++b) h.set_bit(b, false);

  // Selector x uniform over [0, 2^48) subject to x mod k == chain.
  constexpr std::uint64_t kSelectorSpan = std::uint64_t{1} << kChainSelectorBits;
  std::uint64_t k = params.k;
  std::uint64_t chain = std::uniform_int_distribution<std::uint64_t>(0, k - 1)(rng);
  std::uint64_t slots = (kSelectorSpan - 1 - chain) / k;
  std::uint64_t j = std::uniform_int_distribution<std::uint64_t>(0, slots)(rng);
  h.set_trailing_bits(kChainSelectorBits, chain + k * j);
  return h;
}

std::optional<HashValue> oracle_mining_attempt(Rng& rng, const ProtocolParams& params) {
  if (params.mode != MiningMode::oracle) throw ConfigError("oracle mining attempt in real_hash mode");
  if (!bernoulli(rng, params.success_probability())) return std::nullopt;
  return synthesize_valid_hash(rng, params);
}

std::optional<HashValue> real_mining_attempt(const Block& candidate, const ProtocolParams& params) {
  if (params.mode != MiningMode::real_hash) throw ConfigError("real mining attempt in oracle mode");
  HashValue h = hash_block(candidate, params.lambda);
  if (!is_pow_valid(h, params)) return std::nullopt;
  return h;
}

Oracle::Oracle(const ProtocolParams& params) : mode_(params.mode), lambda_(params.lambda) {}

HashValue Oracle::program(const HashValue& digest, const HashValue& h) {
  if (mode_ == MiningMode::real_hash) return digest;
  return table_.try_emplace(digest, h).first->second;
}

std::optional<HashValue> Oracle::lookup(const HashValue& digest) const {
  if (mode_ == MiningMode::real_hash) return digest;
  auto it = table_.find(digest);
  if (it == table_.end()) return std::nullopt;
  return it->second;
}

bool Oracle::verify(const HashValue& digest, const HashValue& h) const {
  if (mode_ == MiningMode::real_hash) return digest == h;
  auto it = table_.find(digest);
  return it != table_.end() && it->second == h;
}

}  // namespace parchain
