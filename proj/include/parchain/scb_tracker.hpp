#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <tuple>
#include <vector>

#include "parchain/chainstore.hpp"

namespace parchain {

/// Incremental SCB maintenance for one node. Works over any view exposing
/// chain_count(), tip(i), parent(id), height(id), rank(id), next_rank(id)
/// with dense ids, so the single-chain reference node can share it.
///
/// refresh() must produce the same sequence as output_scb(); it only avoids
/// rescanning the whole paths every tick.
template <class View>
class ScbTracker {
 public:
  struct Update {
    std::vector<LocalId> newly_partial;  // first time partially confirmed at this node
    std::vector<LocalId> newly_full;     // first time in this node's SCB
    bool rebuilt = false;
    bool bar_decreased = false;
    std::size_t partial_reorgs = 0;  // chains whose partial prefix was cut
  };

  explicit ScbTracker(std::uint32_t T) : T_(T) {}

  Update refresh(const View& view) {
    Update up;
    const std::uint32_t k = view.chain_count();
    if (paths_.size() != k) {
      paths_.assign(k, {});
      partial_.assign(k, 0);
      cursor_.assign(k, 0);
    }
    bool rebuild = false;
    for (std::uint32_t i = 0; i < k; ++i) {
      auto& path = paths_[i];
      LocalId t = view.tip(i);
      if (!path.empty() && path.back() == t) continue;

      std::vector<LocalId> segment;
      LocalId x = t;
      while (x != kNoBlock) {
        auto h = view.height(x);
        if (h < path.size() && path[h] == x) break;
        segment.push_back(x);
        x = view.parent(x);
      }
      std::size_t keep = x == kNoBlock ? 0 : view.height(x) + 1;
      if (keep < partial_[i]) {
        ++up.partial_reorgs;
        partial_[i] = keep;
      }
      if (keep < cursor_[i]) rebuild = true;
      path.resize(keep);
      path.insert(path.end(), segment.rbegin(), segment.rend());

      std::size_t partial = path.size() > T_ ? path.size() - T_ : 0;
      for (std::size_t p = partial_[i]; p < partial; ++p) mark(ever_partial_, path[p], up.newly_partial);
      partial_[i] = partial;
    }

    std::uint64_t bar = std::numeric_limits<std::uint64_t>::max();
    bool every_chain_partial = true;
    for (std::uint32_t i = 0; i < k; ++i) {
      std::uint64_t y = partial_[i] > 0 ? view.next_rank(paths_[i][partial_[i] - 1]) : 1;
      bar = std::min(bar, y);
      every_chain_partial = every_chain_partial && partial_[i] > 0;
    }
    if (bar < bar_) {
      up.bar_decreased = true;
      rebuild = true;
    }
    bar_ = bar;
    // Nothing is output until every chain has a partially-confirmed block.
    const std::uint64_t cut = every_chain_partial ? bar_ : 0;

    auto by_rank_chain = [&](const Item& a, const Item& b) { return std::tie(a.rank, a.chain) < std::tie(b.rank, b.chain); };
    std::size_t first_new = scb_.size();
    if (rebuild) {
      up.rebuilt = true;
      std::vector<Item> items;
      for (std::uint32_t i = 0; i < k; ++i) {
        cursor_[i] = 0;
        while (cursor_[i] < partial_[i] && view.rank(paths_[i][cursor_[i]]) < cut) {
          items.push_back({view.rank(paths_[i][cursor_[i]]), i, paths_[i][cursor_[i]]});
          ++cursor_[i];
        }
      }
      std::sort(items.begin(), items.end(), by_rank_chain);
      scb_.clear();
      for (const auto& it : items) scb_.push_back(it.id);
      first_new = 0;
    } else {
      batch_.clear();
      for (std::uint32_t i = 0; i < k; ++i) {
        while (cursor_[i] < partial_[i] && view.rank(paths_[i][cursor_[i]]) < cut) {
          batch_.push_back({view.rank(paths_[i][cursor_[i]]), i, paths_[i][cursor_[i]]});
          ++cursor_[i];
        }
      }
      std::sort(batch_.begin(), batch_.end(), by_rank_chain);
      for (const auto& it : batch_) scb_.push_back(it.id);
    }
    for (std::size_t j = first_new; j < scb_.size(); ++j) mark(ever_full_, scb_[j], up.newly_full);
    return up;
  }

  const std::vector<LocalId>& scb() const { return scb_; }
  std::uint64_t confirm_bar() const { return bar_; }
  std::uint32_t depth() const { return T_; }
  const std::vector<LocalId>& path(std::uint32_t chain) const { return paths_[chain]; }

 private:
  struct Item {
    std::uint64_t rank;
    std::uint32_t chain;
    LocalId id;
  };

  static void mark(std::vector<bool>& seen, LocalId id, std::vector<LocalId>& out) {
    if (seen.size() <= id) seen.resize(std::max<std::size_t>(id + 1, seen.size() * 2), false);
    if (!seen[id]) {
      seen[id] = true;
      out.push_back(id);
    }
  }

  std::uint32_t T_;
  std::vector<std::vector<LocalId>> paths_;
  std::vector<std::size_t> partial_;
  std::vector<std::size_t> cursor_;
  std::vector<LocalId> scb_;
  std::vector<Item> batch_;
  std::uint64_t bar_ = 1;
  std::vector<bool> ever_partial_;
  std::vector<bool> ever_full_;
};

}  // namespace parchain
