#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "parchain/consensus.hpp"
#include "parchain/hash_oracle.hpp"

namespace parchain::testing {

struct FixtureBlock {
  BlockPtr block;
  Attachment attachment;
};

/// Valid block DAG mined by several miners whose views drift apart. Some
/// miners claim genesis-0 as their trailing block, and miners only learn
/// each other's blocks through random gossip, so the DAG has forks on every
/// chain and trailing references that point across forks.
struct Fixture {
  ProtocolParams params;
  Oracle oracle;
  std::vector<FixtureBlock> blocks;  // in mining order, so references precede use

  explicit Fixture(const ProtocolParams& p) : params(p), oracle(p) {}
};

inline Fixture make_fixture(std::uint32_t k, std::size_t count, std::uint64_t seed, std::size_t miners = 5,
                            double liar_fraction = 0.4, double gossip = 0.6) {
  ProtocolParams params;
  params.k = k;
  params.p = 1.0 / (8.0 * k);
  params.lambda = 256;
  params.mode = MiningMode::oracle;
  Fixture fx(params);
  Rng rng(seed);
  std::vector<ChainStore> views;
  std::vector<std::size_t> seen(miners, 0);
  for (std::size_t m = 0; m < miners; ++m) views.emplace_back(k, params.lambda);
  std::size_t liars = static_cast<std::size_t>(liar_fraction * static_cast<double>(miners));
  HashValue stale = views[0].hash(views[0].genesis(0));

  while (fx.blocks.size() < count) {
    std::size_t m = rng() % miners;
    auto& view = views[m];
    // Catch up on a random number of blocks the miner has not seen, in order.
    if (uniform01(rng) < gossip) {
      std::size_t target = seen[m] + rng() % (fx.blocks.size() - seen[m] + 1);
      for (; seen[m] < target; ++seen[m]) {
        const auto& b = fx.blocks[seen[m]];
        process_block(view, fx.oracle, params, b.block, b.attachment);
      }
    }
    Bytes payload(8 + rng() % 24);
    for (auto& byte : payload) byte = static_cast<std::uint8_t>(rng());
    Nonce nonce{};
    std::uint64_t x = rng();
    for (int j = 0; j < 8; ++j) nonce[j] = static_cast<std::uint8_t>(x >> (8 * j));
    Block candidate = assemble_candidate(view, std::move(payload), nonce);
    if (m < liars && uniform01(rng) < 0.5) candidate.trailing = stale;
    HashValue h = synthesize_valid_hash(rng, params);
    h = fx.oracle.program(hash_block(candidate, params.lambda), h);
    auto mined = on_mining_success(view, fx.oracle, params, std::move(candidate), h);
    fx.blocks.push_back({mined.block, mined.attachment});
  }
  return fx;
}

}  // namespace parchain::testing
