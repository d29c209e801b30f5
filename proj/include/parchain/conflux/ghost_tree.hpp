#pragma once

#include <cstdint>
#include <limits>
#include <vector>

namespace parchain::conflux {

using BlockId = std::uint32_t;
inline constexpr BlockId kNoParent = std::numeric_limits<BlockId>::max();

/// Block tree for heaviest-subtree fork choice. Subtree weights (block
/// counts) are kept up to date on every insertion, and so is each block's
/// preferred child: the heaviest one, ties to the smallest key. Keys are
/// global block labels, so two trees holding different subsets of the same
/// blocks break ties the same way.
class GhostTree {
 public:
  /// Starts with the root (genesis) as block 0.
  explicit GhostTree(std::uint64_t root_key = 0);

  void clear(std::uint64_t root_key = 0);

  /// Adds one child of `parent`.
  BlockId add(BlockId parent, std::uint64_t key);
  /// Adds `count` siblings under `parent` with keys first_key, first_key+1,
  /// ...; returns the first id (ids are consecutive). One ancestor walk.
  BlockId add_siblings(BlockId parent, std::uint32_t count, std::uint64_t first_key);

  std::size_t size() const { return nodes_.size(); }
  BlockId parent(BlockId b) const { return nodes_[b].parent; }
  std::uint64_t key(BlockId b) const { return nodes_[b].key; }
  std::uint64_t weight(BlockId b) const { return nodes_[b].weight; }
  std::uint32_t depth(BlockId b) const { return nodes_[b].depth; }
  std::vector<BlockId> children(BlockId b) const;
  /// Heaviest child, kNoParent for a leaf.
  BlockId preferred_child(BlockId b) const { return nodes_[b].best; }

  /// Root-to-leaf heaviest-subtree descent.
  std::vector<BlockId> ghost_path() const;
  BlockId ghost_leaf() const;

  /// Subtree weights recomputed from the parent links alone.
  std::vector<std::uint64_t> recompute_weights() const;

 private:
  struct Node {
    BlockId parent;
    std::uint64_t key;
    std::uint64_t weight;
    std::uint32_t depth;
    BlockId best;
    BlockId first_child;
    BlockId next_sibling;
  };

  bool heavier(BlockId a, BlockId b) const;
  void add_weight(BlockId from, std::uint64_t amount);

  std::vector<Node> nodes_;
};

}  // namespace parchain::conflux
