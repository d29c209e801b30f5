#include <doctest.h>

#include <algorithm>
#include <map>

#include "parchain/consensus.hpp"
#include "parchain/scb_tracker.hpp"
#include "support/fixture.hpp"

using namespace parchain;

namespace {

struct Miner {
  ProtocolParams params;
  Oracle oracle;
  Rng rng;

  explicit Miner(std::uint32_t k, std::uint64_t seed = 1) : params(make_params(k)), oracle(params), rng(seed) {}

  static ProtocolParams make_params(std::uint32_t k) {
    ProtocolParams p;
    p.k = k;
    p.p = 1.0 / (16.0 * k);
    p.mode = MiningMode::oracle;
    return p;
  }

  HashValue hash_on(std::uint32_t chain) {
    for (;;) {
      HashValue h = synthesize_valid_hash(rng, params);
      if (chain_index(h, params.k) == chain) return h;
    }
  }

  Block candidate(const ChainStore& store) {
    Nonce nonce{};
    std::uint64_t x = rng();
    for (int j = 0; j < 8; ++j) nonce[j] = static_cast<std::uint8_t>(x >> (8 * j));
    return assemble_candidate(store, Bytes{9, 8, 7}, nonce);
  }

  MinedBlock mine(ChainStore& store, std::uint32_t chain) {
    Block b = candidate(store);
    HashValue h = oracle.program(hash_block(b, params.lambda), hash_on(chain));
    return on_mining_success(store, oracle, params, std::move(b), h);
  }
};

Ranks stored(const ChainStore& s, const HashValue& h) {
  LocalId id = *s.find(h);
  return {s.rank(id), s.next_rank(id)};
}

}  // namespace

TEST_CASE("rank assignment from parent and trailing") {
  CHECK(assign_ranks(5, 5) == Ranks{5, 6});
  CHECK(assign_ranks(1, 5) == Ranks{1, 5});
  CHECK(assign_ranks(3, 1) == Ranks{3, 4});
}

TEST_CASE("first block on a fresh state gets (1, 2)") {
  Miner miner(4);
  ChainStore s(4, 256);
  auto m = miner.mine(s, 2);
  CHECK(m.attachment.leaf == s.hash(s.genesis(2)));
  CHECK(m.attachment.rank == 1);
  CHECK(m.attachment.next_rank == 2);
  CHECK(m.attachment.leaf_proof.siblings.size() == 2);
}

TEST_CASE("replay of blocks catching up to a (4, 5) trailing block") {
  Miner miner(2);
  ChainStore s(2, 256);
  for (int i = 0; i < 4; ++i) miner.mine(s, 1);
  REQUIRE(s.next_rank(s.tip(1)) == 5);
  std::vector<Ranks> got;
  for (int i = 0; i < 3; ++i) {
    auto m = miner.mine(s, 0);
    got.push_back({m.attachment.rank, m.attachment.next_rank});
  }
  CHECK(got == std::vector<Ranks>{{1, 5}, {5, 6}, {6, 7}});
}

TEST_CASE("single chain blocks get consecutive ranks") {
  Miner miner(1);
  ChainStore s(1, 256);
  for (std::uint64_t j = 1; j <= 40; ++j) {
    auto m = miner.mine(s, 0);
    REQUIRE(m.attachment.rank == j);
    REQUIRE(m.attachment.next_rank == j + 1);
  }
}

TEST_CASE("receivers recompute ranks") {
  Miner miner(2);
  ChainStore source(2, 256);
  for (int i = 0; i < 4; ++i) miner.mine(source, 1);
  auto m = miner.mine(source, 0);
  auto lying = m.attachment;
  lying.rank = 1000;
  lying.next_rank = 5000;
  ChainStore s(2, 256);
  for (LocalId id = 2; id + 1 < source.size(); ++id) {
    process_block(s, miner.oracle, miner.params, source.at(id).block, source.at(id).attachment);
  }
  auto r = process_block(s, miner.oracle, miner.params, m.block, lying);
  REQUIRE(r.verdict == Verdict::accepted);
  CHECK(stored(s, m.attachment.hash) == Ranks{1, 5});
}

TEST_CASE("verification failures are rejected with a reason") {
  Miner miner(4);
  ChainStore source(4, 256);
  miner.mine(source, 1);
  Block b = miner.candidate(source);
  HashValue h = miner.oracle.program(hash_block(b, 256), miner.hash_on(3));
  auto good = on_mining_success(source, miner.oracle, miner.params, b, h);

  ChainStore fresh(4, 256);
  SUBCASE("hash without enough leading zeros") {
    auto a = good.attachment;
    a.hash.set_bit(0, true);
    CHECK(process_block(fresh, miner.oracle, miner.params, good.block, a).reason == Reason::bad_pow);
  }
  SUBCASE("content that does not hash to the claimed value") {
    auto tampered = std::make_shared<Block>(*good.block);
    tampered->transactions.push_back(0);
    auto r = process_block(fresh, miner.oracle, miner.params, tampered, good.attachment);
    CHECK(r.verdict == Verdict::rejected);
    CHECK(r.reason == Reason::bad_hash);
  }
  SUBCASE("corrupted sibling") {
    auto a = good.attachment;
    a.leaf_proof.siblings[1].set_bit(3, !a.leaf_proof.siblings[1].bit(3));
    CHECK(process_block(fresh, miner.oracle, miner.params, good.block, a).reason == Reason::bad_proof);
  }
  SUBCASE("proof for another index") {
    auto a = good.attachment;
    // Proves leaf 2 of the same tree while the hash selects chain 3.
    ChainStore before(4, 256);
    process_block(before, miner.oracle, miner.params, source.at(4).block, source.at(4).attachment);
    a.leaf = before.merkle().leaf(2);
    a.leaf_proof = before.merkle().prove(2);
    CHECK(process_block(fresh, miner.oracle, miner.params, good.block, a).reason == Reason::bad_proof);
  }
  SUBCASE("oversized block") {
    auto big = std::make_shared<Block>(*good.block);
    big->transactions.resize(kDefaultMaxBlockBytes);
    CHECK(process_block(fresh, miner.oracle, miner.params, big, good.attachment).reason == Reason::oversize);
  }
  SUBCASE("valid block waits for its parent") {
    auto r = process_block(fresh, miner.oracle, miner.params, good.block, good.attachment);
    CHECK(r.verdict == Verdict::buffered);
  }
}

TEST_CASE("candidate assembly") {
  ChainStore a(4, 256);
  ChainStore b(4, 256);
  Nonce nonce{1, 2, 3, 4, 5, 6, 7, 8};
  auto ca = assemble_candidate(a, Bytes{1, 2}, nonce);
  auto cb = assemble_candidate(b, Bytes{1, 2}, nonce);
  CHECK(ca == cb);
  CHECK(ca.trailing == a.hash(a.genesis(0)));
  std::vector<HashValue> genesis;
  for (std::uint32_t i = 0; i < 4; ++i) genesis.push_back(a.hash(a.genesis(i)));
  CHECK(ca.root == MerkleTree::build(genesis).root());

  Miner miner(4);
  miner.mine(a, 2);
  CHECK(assemble_candidate(a, Bytes{1, 2}, nonce).root != ca.root);
  CHECK_THROWS_AS(assemble_candidate(a, Bytes(kDefaultMaxBlockBytes), nonce), std::length_error);
}

TEST_CASE("on_mining_success refuses an invalid hash") {
  Miner miner(2);
  ChainStore s(2, 256);
  Block b = miner.candidate(s);
  HashValue bad(256);
  bad.set_bit(0, true);
  CHECK_THROWS_AS(on_mining_success(s, miner.oracle, miner.params, b, bad), std::logic_error);
}

TEST_CASE("confirm bar and SCB for y = (5, 7, 9)") {
  Miner miner(3);
  ChainStore s(3, 256);
  for (int i = 0; i < 4; ++i) miner.mine(s, 0);  // ... (4, 5)
  for (int i = 0; i < 3; ++i) miner.mine(s, 1);  // (1, 5) (5, 6) (6, 7)
  for (int i = 0; i < 3; ++i) miner.mine(s, 2);  // (1, 7) (7, 8) (8, 9)
  for (std::uint32_t c = 0; c < 3; ++c) miner.mine(s, c);  // one unconfirmed tip each
  auto view = confirm_view(s, 1);
  CHECK(view.y == std::vector<std::uint64_t>{5, 7, 9});
  CHECK(view.confirm_bar == 5);
  auto scb = output_scb(s, 1);
  CHECK(scb.size() == 9);
  for (std::size_t i = 1; i < scb.size(); ++i) {
    CHECK(std::tie(scb[i - 1].rank, scb[i - 1].chain_id) < std::tie(scb[i].rank, scb[i].chain_id));
  }
  for (const auto& e : scb) CHECK(e.rank < 5);
}

TEST_CASE("fresh state has an empty SCB") {
  ChainStore s(4, 256);
  CHECK(output_scb(s, 2).empty());
  CHECK(confirm_view(s, 2).confirm_bar == 1);
}

TEST_CASE("single chain SCB is the chain minus its last T blocks") {
  Miner miner(1);
  ChainStore s(1, 256);
  for (int i = 0; i < 20; ++i) miner.mine(s, 0);
  auto scb = output_scb(s, 6);
  auto prefix = s.partially_confirmed(0, 6);
  REQUIRE(scb.size() == prefix.size());
  for (std::size_t i = 0; i < scb.size(); ++i) CHECK(scb[i].block_hash == s.hash(prefix[i]));
}

TEST_CASE("incremental tracker matches output_scb") {
  auto fx = testing::make_fixture(4, 400, 77);
  Rng rng(78);
  for (int round = 0; round < 5; ++round) {
    auto order = fx.blocks;
    // Partial shuffle keeps some structure so reorgs of varying depth happen.
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
      if (uniform01(rng) < 0.3) std::swap(order[i], order[i + 1 + rng() % std::min<std::size_t>(20, order.size() - i - 1)]);
    }
    for (std::uint32_t T : {1U, 3U, 6U}) {
      ChainStore s(4, 256);
      ScbTracker<ChainStore> tracker(T);
      for (const auto& b : order) {
        process_block(s, fx.oracle, fx.params, b.block, b.attachment);
        tracker.refresh(s);
        auto expected = output_scb(s, T);
        REQUIRE(tracker.scb().size() == expected.size());
        for (std::size_t i = 0; i < expected.size(); ++i) REQUIRE(s.hash(tracker.scb()[i]) == expected[i].block_hash);
        REQUIRE(tracker.confirm_bar() == confirm_view(s, T).confirm_bar);
      }
    }
  }
}

TEST_CASE("attachments agree across delivery orders") {
  auto fx = testing::make_fixture(8, 500, 91);
  ChainStore reference(8, 256);
  for (const auto& b : fx.blocks) process_block(reference, fx.oracle, fx.params, b.block, b.attachment);
  REQUIRE(reference.size() == 508);
  Rng rng(92);
  for (int perm = 0; perm < 20; ++perm) {
    auto order = fx.blocks;
    std::shuffle(order.begin(), order.end(), rng);
    ChainStore s(8, 256);
    for (const auto& b : order) process_block(s, fx.oracle, fx.params, b.block, b.attachment);
    REQUIRE(s.size() == reference.size());
    for (LocalId id = 0; id < reference.size(); ++id) {
      REQUIRE(stored(s, reference.hash(id)) == Ranks{reference.rank(id), reference.next_rank(id)});
    }
  }
}
