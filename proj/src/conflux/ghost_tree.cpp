#include "parchain/conflux/ghost_tree.hpp"

#include <algorithm>
#include <stdexcept>

namespace parchain::conflux {

GhostTree::GhostTree(std::uint64_t root_key) { clear(root_key); }

void GhostTree::clear(std::uint64_t root_key) {
  nodes_.clear();
  nodes_.push_back({kNoParent, root_key, 1, 0, kNoParent, kNoParent, kNoParent});
}

bool GhostTree::heavier(BlockId a, BlockId b) const {
  const auto& x = nodes_[a];
  const auto& y = nodes_[b];
  return x.weight != y.weight ? x.weight > y.weight : x.key < y.key;
}

void GhostTree::add_weight(BlockId from, std::uint64_t amount) {
  // `from` and its ancestors each gain `amount`; a parent's preferred child
  // can only change to the child whose weight just went up.
  BlockId child = kNoParent;
  for (BlockId x = from; x != kNoParent; x = nodes_[x].parent) {
    nodes_[x].weight += amount;
    if (child != kNoParent) {
      auto& best = nodes_[x].best;
      if (best == kNoParent || (best != child && heavier(child, best))) best = child;
    }
    child = x;
  }
}

BlockId GhostTree::add(BlockId parent, std::uint64_t key) { return add_siblings(parent, 1, key); }

BlockId GhostTree::add_siblings(BlockId parent, std::uint32_t count, std::uint64_t first_key) {
  if (parent >= nodes_.size()) throw std::out_of_range("ghost tree parent does not exist");
  if (count == 0) throw std::invalid_argument("add_siblings needs at least one block");
  const auto first = static_cast<BlockId>(nodes_.size());
  const auto depth = nodes_[parent].depth + 1;
  for (std::uint32_t j = 0; j < count; ++j) {
    nodes_.push_back({parent, first_key + j, 1, depth, kNoParent, kNoParent, nodes_[parent].first_child});
    nodes_[parent].first_child = first + j;
    auto& best = nodes_[parent].best;
    if (best == kNoParent || heavier(first + j, best)) best = first + j;
  }
  add_weight(parent, count);
  return first;
}

std::vector<BlockId> GhostTree::children(BlockId b) const {
  std::vector<BlockId> out;
  for (BlockId c = nodes_[b].first_child; c != kNoParent; c = nodes_[c].next_sibling) out.push_back(c);
  std::reverse(out.begin(), out.end());
  return out;
}

std::vector<BlockId> GhostTree::ghost_path() const {
  std::vector<BlockId> path{0};
  while (nodes_[path.back()].best != kNoParent) path.push_back(nodes_[path.back()].best);
  return path;
}

BlockId GhostTree::ghost_leaf() const {
  BlockId x = 0;
  while (nodes_[x].best != kNoParent) x = nodes_[x].best;
  return x;
}

std::vector<std::uint64_t> GhostTree::recompute_weights() const {
  std::vector<std::uint64_t> w(nodes_.size(), 1);
  // Children always have larger ids than their parents.
  for (auto b = nodes_.size(); b-- > 1;) w[nodes_[b].parent] += w[b];
  return w;
}

}  // namespace parchain::conflux
