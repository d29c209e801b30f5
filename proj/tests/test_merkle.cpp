#include <doctest.h>

#include <vector>

#include "parchain/hash_oracle.hpp"
#include "parchain/merkle.hpp"

using namespace parchain;

namespace {

std::vector<HashValue> genesis_leaves(std::uint32_t k) {
  std::vector<HashValue> leaves;
  for (std::uint32_t i = 0; i < k; ++i) leaves.push_back(hash_block(make_genesis(i, 256), 256));
  return leaves;
}

std::vector<HashValue> random_leaves(Rng& rng, std::size_t k, unsigned lambda = 256) {
  std::vector<HashValue> leaves;
  for (std::size_t i = 0; i < k; ++i) {
    HashValue h(lambda);
    for (auto& b : h.mutable_bytes()) b = static_cast<std::uint8_t>(rng());
    leaves.push_back(h);
  }
  return leaves;
}

void flip(HashValue& h, unsigned bit) { h.set_bit(bit, !h.bit(bit)); }

}  // namespace

TEST_CASE("merkle roots match the frozen digests") {
  CHECK(MerkleTree::build(genesis_leaves(4)).root().hex() ==
        "95ef7dee0cb65c5771559fae306acea59325cf360385aa5546f13c286810f604");
  CHECK(MerkleTree::build(genesis_leaves(3)).root().hex() ==
        "9d89ffe40ea4f59c2f69f62f07094896452d865f9e81e81621f8ac91c7faaa3d");
  CHECK(MerkleTree::build(genesis_leaves(1)).root().hex() ==
        "5f7f840c73bd7af86936fd734e617316a47b7d3edcad8e64bb7606732158300a");
}

TEST_CASE("single leaf tree has an empty proof") {
  auto tree = MerkleTree::build(genesis_leaves(1));
  CHECK(tree.root() == merkle_single_root(tree.leaf(0)));
  auto proof = tree.prove(0);
  CHECK(proof.siblings.empty());
  CHECK(verify(tree.root(), 0, tree.leaf(0), proof));
  CHECK_FALSE(verify(tree.root(), 1, tree.leaf(0), proof));
}

TEST_CASE("build rejects bad input") {
  std::vector<HashValue> none;
  CHECK_THROWS_AS(MerkleTree::build(none), std::invalid_argument);
  std::vector<HashValue> mixed{HashValue(256), HashValue(128)};
  CHECK_THROWS_AS(MerkleTree::build(mixed), std::invalid_argument);
  auto tree = MerkleTree::build(genesis_leaves(4));
  CHECK_THROWS_AS(tree.prove(4), std::out_of_range);
}

TEST_CASE("proof length is ceil(log2 k)") {
  Rng rng(3);
  for (std::size_t k : {1, 2, 3, 4, 5, 8, 9, 250}) {
    auto tree = MerkleTree::build(random_leaves(rng, k));
    std::size_t expected = 0;
    while ((std::size_t{1} << expected) < k) ++expected;
    CHECK(tree.prove(static_cast<std::uint32_t>(k - 1)).siblings.size() == expected);
  }
  auto tree = MerkleTree::build(genesis_leaves(4));
  CHECK(tree.prove(3).siblings.size() == 2);
}

TEST_CASE("changing one leaf changes the root") {
  auto leaves = genesis_leaves(4);
  auto before = MerkleTree::build(leaves).root();
  flip(leaves[2], 255);
  CHECK(MerkleTree::build(leaves).root() != before);
}

TEST_CASE("round trip holds and every single-bit mutation breaks it") {
  Rng rng(5);
  for (std::size_t k : {1, 2, 4, 8, 16}) {
    for (int trial = 0; trial < 100; ++trial) {
      auto leaves = random_leaves(rng, k);
      auto tree = MerkleTree::build(leaves);
      REQUIRE(MerkleTree::build(leaves).root() == tree.root());
      for (std::uint32_t i = 0; i < k; ++i) {
        auto proof = tree.prove(i);
        REQUIRE(verify(tree.root(), i, leaves[i], proof));
        unsigned bit = static_cast<unsigned>(rng() % 256);

        HashValue leaf = leaves[i];
        flip(leaf, bit);
        REQUIRE_FALSE(verify(tree.root(), i, leaf, proof));

        HashValue root = tree.root();
        flip(root, bit);
        REQUIRE_FALSE(verify(root, i, leaves[i], proof));

        for (std::size_t s = 0; s < proof.siblings.size(); ++s) {
          auto bad = proof;
          flip(bad.siblings[s], bit);
          REQUIRE_FALSE(verify(tree.root(), i, leaves[i], bad));
        }
      }
    }
  }
}

TEST_CASE("a proof only verifies at its own index") {
  Rng rng(7);
  auto leaves = random_leaves(rng, 8);
  auto tree = MerkleTree::build(leaves);
  for (std::uint32_t i = 0; i < 8; ++i) {
    auto proof = tree.prove(i);
    for (std::uint32_t j = 0; j < 8; ++j) {
      CHECK(verify(tree.root(), j, leaves[i], proof) == (i == j));
    }
  }
}

TEST_CASE("malformed proofs are rejected") {
  Rng rng(9);
  auto leaves = random_leaves(rng, 8);
  auto tree = MerkleTree::build(leaves);
  auto proof = tree.prove(5);
  auto shorter = proof;
  shorter.siblings.pop_back();
  CHECK_FALSE(verify(tree.root(), 5, leaves[5], shorter));
  auto longer = proof;
  longer.siblings.push_back(leaves[0]);
  CHECK_FALSE(verify(tree.root(), 5, leaves[5], longer));
  CHECK_FALSE(verify(tree.root(), 8, leaves[5], proof));
  auto narrow = proof;
  narrow.siblings[0] = HashValue(128);
  CHECK_FALSE(verify(tree.root(), 5, leaves[5], narrow));
}

TEST_CASE("update_leaf agrees with a full rebuild") {
  Rng rng(11);
  for (std::size_t k : {1, 3, 7, 16}) {
    auto leaves = random_leaves(rng, k);
    auto tree = MerkleTree::build(leaves);
    for (int step = 0; step < 50; ++step) {
      std::size_t i = rng() % k;
      leaves[i] = random_leaves(rng, 1).front();
      tree.update_leaf(i, leaves[i]);
      REQUIRE(tree.root() == MerkleTree::build(leaves).root());
    }
  }
}

TEST_CASE("padding leaves are zero digests") {
  Rng rng(13);
  auto leaves = random_leaves(rng, 3);
  auto padded = leaves;
  padded.push_back(HashValue(256));
  CHECK(MerkleTree::build(leaves).root() == MerkleTree::build(padded).root());
}
