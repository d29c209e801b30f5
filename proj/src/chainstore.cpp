#include "parchain/chainstore.hpp"

#include <algorithm>
#include <tuple>

#include "parchain/hash_oracle.hpp"

namespace parchain {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::accepted: return "accepted";
    case Verdict::buffered: return "buffered";
    case Verdict::duplicate: return "duplicate";
    case Verdict::rejected: return "rejected";
  }
  return "unknown";
}

std::string_view to_string(Reason r) {
  switch (r) {
    case Reason::none: return "none";
    case Reason::bad_pow: return "bad_pow";
    case Reason::bad_hash: return "bad_hash";
    case Reason::bad_proof: return "bad_proof";
    case Reason::oversize: return "oversize";
    case Reason::wrong_chain_parent: return "wrong_chain_parent";
    case Reason::missing_parent: return "missing_parent";
    case Reason::missing_trailing: return "missing_trailing";
    case Reason::duplicate: return "duplicate";
  }
  return "unknown";
}

ChainStore::ChainStore(std::uint32_t k, unsigned lambda, std::size_t pending_cap)
    : k_(k), lambda_(lambda), pending_cap_(pending_cap) {
  if (k == 0) throw ConfigError("chain count must be positive");
  blocks_.reserve(k);
  std::vector<HashValue> leaves;
  leaves.reserve(k);
  for (std::uint32_t i = 0; i < k; ++i) {
    auto g = std::make_shared<const Block>(make_genesis(i, lambda));
    StoredBlock s;
    s.attachment.hash = hash_block(*g, lambda);
    s.attachment.leaf = HashValue(lambda);
    s.attachment.rank = 0;
    s.attachment.next_rank = 1;
    s.block = std::move(g);
    s.chain = i;
    index_.emplace(s.attachment.hash, i);
    leaves.push_back(s.attachment.hash);
    blocks_.push_back(std::move(s));
    tips_.push_back(i);
  }
  merkle_ = MerkleTree::build(leaves);
  trailing_ = recompute_trailing();
}

std::optional<LocalId> ChainStore::find(const HashValue& h) const {
  auto it = index_.find(h);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<LocalId> ChainStore::longest_path(std::uint32_t chain) const {
  std::vector<LocalId> path;
  path.reserve(height(tips_[chain]) + 1);
  for (LocalId x = tips_[chain]; x != kNoBlock; x = parent(x)) path.push_back(x);
  std::reverse(path.begin(), path.end());
  return path;
}

std::vector<LocalId> ChainStore::partially_confirmed(std::uint32_t chain, std::uint32_t T) const {
  auto path = longest_path(chain);
  path.resize(path.size() > T ? path.size() - T : 0);
  return path;
}

bool ChainStore::better_trailing(LocalId a, LocalId b) const {
  const auto& x = blocks_[a];
  const auto& y = blocks_[b];
  if (x.attachment.next_rank != y.attachment.next_rank) return x.attachment.next_rank > y.attachment.next_rank;
  return std::tie(x.chain, x.attachment.hash) < std::tie(y.chain, y.attachment.hash);
}

LocalId ChainStore::recompute_trailing() const {
  LocalId best = 0;
  for (LocalId id = 1; id < blocks_.size(); ++id) {
    if (better_trailing(id, best)) best = id;
  }
  return best;
}

const MerkleTree& ChainStore::merkle() const {
  if (!stale_leaves_.empty()) {
    std::sort(stale_leaves_.begin(), stale_leaves_.end());
    stale_leaves_.erase(std::unique(stale_leaves_.begin(), stale_leaves_.end()), stale_leaves_.end());
    for (auto chain : stale_leaves_) merkle_.update_leaf(chain, hash(tips_[chain]));
    stale_leaves_.clear();
  }
  return merkle_;
}

InsertResult ChainStore::insert(BlockPtr block, Attachment attachment) {
  InsertResult result;
  if (contains(attachment.hash) || is_pending(attachment.hash)) {
    result.verdict = Verdict::duplicate;
    result.reason = Reason::duplicate;
    return result;
  }
  Link link = try_link(block, attachment);
  result.verdict = link.verdict;
  result.reason = link.reason;
  if (link.verdict == Verdict::accepted) {
    result.accepted.push_back(link.id);
    cascade(attachment.hash, result);
  } else if (link.verdict == Verdict::buffered) {
    buffer(std::move(block), std::move(attachment), link.waiting_on);
  }
  return result;
}

ChainStore::Link ChainStore::try_link(const BlockPtr& block, const Attachment& attachment) {
  std::uint32_t chain = chain_index(attachment.hash, k_);
  auto parent_id = find(attachment.leaf);
  if (!parent_id) return {Verdict::buffered, Reason::missing_parent, attachment.leaf};
  if (chain_of(*parent_id) != chain) return {Verdict::rejected, Reason::wrong_chain_parent, {}};
  if (!contains(block->trailing)) return {Verdict::buffered, Reason::missing_trailing, block->trailing};
  LocalId id = store(block, attachment, chain, *parent_id);
  return {Verdict::accepted, Reason::none, {}, id};
}

LocalId ChainStore::store(const BlockPtr& block, const Attachment& attachment, std::uint32_t chain, LocalId parent_id) {
  LocalId trailing_id = index_.at(block->trailing);
  Ranks r = assign_ranks(next_rank(parent_id), next_rank(trailing_id));

  StoredBlock s;
  s.block = block;
  s.attachment = attachment;
  s.attachment.rank = r.rank;
  s.attachment.next_rank = r.next_rank;
  s.chain = chain;
  s.parent = parent_id;
  s.height = height(parent_id) + 1;

  auto id = static_cast<LocalId>(blocks_.size());
  index_.emplace(s.attachment.hash, id);
  blocks_.push_back(std::move(s));

  const auto& fresh = blocks_[id];
  const auto& old_tip = blocks_[tips_[chain]];
  if (fresh.height > old_tip.height ||
      (fresh.height == old_tip.height && fresh.attachment.hash < old_tip.attachment.hash)) {
    tips_[chain] = id;
    stale_leaves_.push_back(chain);
  }
  if (better_trailing(id, trailing_)) trailing_ = id;
  return id;
}

void ChainStore::buffer(BlockPtr block, Attachment attachment, const HashValue& waiting_on) {
  std::uint64_t seq = pending_front_seq_ + pending_.size();
  pending_index_.emplace(attachment.hash, seq);
  waiters_[waiting_on].push_back(seq);
  pending_.push_back({std::move(block), std::move(attachment), true});
  ++pending_alive_;

  while (pending_alive_ > pending_cap_) {
    auto& oldest = pending_.front();
    if (oldest.alive) {
      pending_index_.erase(oldest.attachment.hash);
      --pending_alive_;
      ++evicted_;
    }
    pending_.pop_front();
    ++pending_front_seq_;
  }
  while (!pending_.empty() && !pending_.front().alive) {
    pending_.pop_front();
    ++pending_front_seq_;
  }
}

void ChainStore::cascade(const HashValue& arrived, InsertResult& result) {
  std::vector<HashValue> work{arrived};
  while (!work.empty()) {
    HashValue h = work.back();
    work.pop_back();
    auto it = waiters_.find(h);
    if (it == waiters_.end()) continue;
    auto seqs = std::move(it->second);
    waiters_.erase(it);
    for (auto seq : seqs) {
      if (seq < pending_front_seq_) continue;  // evicted
      auto& slot = pending_[seq - pending_front_seq_];
      if (!slot.alive) continue;
      slot.alive = false;
      --pending_alive_;
      pending_index_.erase(slot.attachment.hash);
      BlockPtr block = std::move(slot.block);
      Attachment attachment = std::move(slot.attachment);

      Link link = try_link(block, attachment);
      if (link.verdict == Verdict::accepted) {
        result.accepted.push_back(link.id);
        work.push_back(attachment.hash);
      } else if (link.verdict == Verdict::buffered) {
        buffer(std::move(block), std::move(attachment), link.waiting_on);
      } else {
        ++result.cascade_rejected;
      }
    }
  }
}

nlohmann::json ChainStore::to_json() const {
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& s : blocks_) {
    blocks.push_back({
        {"hash", s.attachment.hash.hex()},
        {"chain", s.chain},
        {"height", s.height},
        {"leaf", s.attachment.leaf.hex()},
        {"trailing", s.block->trailing.hex()},
        {"root", s.block->root.hex()},
        {"rank", s.attachment.rank},
        {"next_rank", s.attachment.next_rank},
        {"transactions_bytes", s.block->transactions.size()},
    });
  }
  nlohmann::json tips = nlohmann::json::array();
  for (auto t : tips_) tips.push_back(hash(t).hex());
  return {
      {"k", k_},
      {"lambda", lambda_},
      {"blocks", std::move(blocks)},
      {"tips", std::move(tips)},
      {"trailing", trailing_hash().hex()},
      {"merkle_root", merkle().root().hex()},
      {"pending", pending_alive_},
  };
}

}  // namespace parchain
