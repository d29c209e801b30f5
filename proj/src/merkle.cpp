#include "parchain/merkle.hpp"

#include <array>
#include <bit>
#include <stdexcept>

#include "parchain/block.hpp"
#include "parchain/hash_oracle.hpp"

namespace parchain {

HashValue merkle_parent(const HashValue& left, const HashValue& right) {
  std::array<std::uint8_t, 1 + 2 * kMaxHashBits / 8> buf{};
  buf[0] = domain::merkle;
  auto l = left.bytes();
  auto r = right.bytes();
  std::copy(l.begin(), l.end(), buf.begin() + 1);
  std::copy(r.begin(), r.end(), buf.begin() + 1 + static_cast<std::ptrdiff_t>(l.size()));
  return sha256_truncated(std::span(buf.data(), 1 + l.size() + r.size()), left.bit_width());
}

HashValue merkle_single_root(const HashValue& leaf) {
  std::array<std::uint8_t, 1 + kMaxHashBits / 8> buf{};
  buf[0] = domain::merkle;
  auto l = leaf.bytes();
  std::copy(l.begin(), l.end(), buf.begin() + 1);
  return sha256_truncated(std::span(buf.data(), 1 + l.size()), leaf.bit_width());
}

MerkleTree MerkleTree::build(std::span<const HashValue> leaves) {
  if (leaves.empty()) throw std::invalid_argument("merkle tree needs at least one leaf");
  unsigned width = leaves.front().bit_width();
  for (const auto& l : leaves) {
    if (l.bit_width() != width) throw std::invalid_argument("merkle leaves differ in width");
  }
  MerkleTree tree;
  tree.leaf_count_ = leaves.size();
  std::size_t padded = std::bit_ceil(leaves.size());
  std::vector<HashValue> base(leaves.begin(), leaves.end());
  base.resize(padded, HashValue(width));
  tree.levels_.push_back(std::move(base));
  while (tree.levels_.back().size() > 1) {
    const auto& below = tree.levels_.back();
    std::vector<HashValue> level;
    level.reserve(below.size() / 2);
    for (std::size_t i = 0; i < below.size(); i += 2) level.push_back(merkle_parent(below[i], below[i + 1]));
    tree.levels_.push_back(std::move(level));
  }
  tree.recompute_root();
  return tree;
}

const HashValue& MerkleTree::leaf(std::size_t i) const {
  if (i >= leaf_count_) throw std::out_of_range("merkle leaf index out of range");
  return levels_.front()[i];
}

MerkleProof MerkleTree::prove(std::uint32_t i) const {
  if (i >= leaf_count_) throw std::out_of_range("merkle leaf index out of range");
  MerkleProof proof;
  proof.leaf_index = i;
  std::size_t pos = i;
  for (std::size_t level = 0; level + 1 < levels_.size(); ++level) {
    proof.siblings.push_back(levels_[level][pos ^ 1U]);
    pos >>= 1;
  }
  return proof;
}

void MerkleTree::update_leaf(std::size_t i, const HashValue& leaf) {
  if (i >= leaf_count_) throw std::out_of_range("merkle leaf index out of range");
  if (leaf.bit_width() != levels_.front()[i].bit_width()) {
    throw std::invalid_argument("merkle leaf width mismatch");
  }
  levels_.front()[i] = leaf;
  std::size_t pos = i;
  for (std::size_t level = 1; level < levels_.size(); ++level) {
    pos >>= 1;
    levels_[level][pos] = merkle_parent(levels_[level - 1][2 * pos], levels_[level - 1][2 * pos + 1]);
  }
  recompute_root();
}

void MerkleTree::recompute_root() {
  root_ = levels_.size() == 1 ? merkle_single_root(levels_.front().front()) : levels_.back().front();
}

bool verify(const HashValue& root, std::uint32_t i, const HashValue& leaf, const MerkleProof& proof) {
  if (leaf.bit_width() != root.bit_width()) return false;
  const auto depth = proof.siblings.size();
  if (depth >= 32 || (static_cast<std::uint64_t>(i) >> depth) != 0) return false;
  if (depth == 0) return merkle_single_root(leaf) == root;
  HashValue acc = leaf;
  std::uint32_t pos = i;
  for (const auto& sibling : proof.siblings) {
    if (sibling.bit_width() != leaf.bit_width()) return false;
    acc = (pos & 1U) ? merkle_parent(sibling, acc) : merkle_parent(acc, sibling);
    pos >>= 1;
  }
  return acc == root;
}

}  // namespace parchain
