#include "parchain/nakamoto.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace parchain::nakamoto {

std::size_t serialized_size(const Block& block) {
  return 1 + 3 * 8 + block.transactions.size() + block.prev.byte_size() + block.nonce.size();
}

Bytes serialize(const Block& block) {
  Bytes out;
  out.reserve(serialized_size(block));
  out.push_back(domain::nakamoto_block);
  append_field(out, block.transactions);
  append_field(out, block.prev.bytes());
  append_field(out, block.nonce);
  return out;
}

HashValue hash_block(const Block& block, unsigned lambda) { return sha256_truncated(serialize(block), lambda); }

Block make_genesis(unsigned lambda) {
  Block g;
  std::string tag = "genesis-0";
  g.transactions.assign(tag.begin(), tag.end());
  g.prev = HashValue(lambda);
  return g;
}

Store::Store(unsigned lambda, std::size_t pending_cap) : pending_cap_(pending_cap) {
  auto g = std::make_shared<const Block>(make_genesis(lambda));
  HashValue h = hash_block(*g, lambda);
  blocks_.push_back({std::move(g), h, kNoBlock, 0});
  index_.emplace(h, 0);
}

std::optional<LocalId> Store::find(const HashValue& h) const {
  auto it = index_.find(h);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<LocalId> Store::longest_path() const {
  std::vector<LocalId> path;
  for (LocalId x = tip_; x != kNoBlock; x = parent(x)) path.push_back(x);
  std::reverse(path.begin(), path.end());
  return path;
}

std::vector<LocalId> Store::confirmed(std::uint32_t T) const {
  auto path = longest_path();
  path.resize(path.size() > T ? path.size() - T : 0);
  return path;
}

LocalId Store::store(BlockPtr block, const HashValue& hash, LocalId parent_id) {
  auto id = static_cast<LocalId>(blocks_.size());
  blocks_.push_back({std::move(block), hash, parent_id, height(parent_id) + 1});
  index_.emplace(hash, id);
  const auto& fresh = blocks_[id];
  const auto& old = blocks_[tip_];
  if (fresh.height > old.height || (fresh.height == old.height && fresh.hash < old.hash)) tip_ = id;
  return id;
}

InsertResult Store::insert(BlockPtr block, const HashValue& hash) {
  InsertResult res;
  if (contains(hash) || is_pending(hash)) {
    res.verdict = Verdict::duplicate;
    res.reason = Reason::duplicate;
    return res;
  }
  auto parent_id = find(block->prev);
  if (!parent_id) {
    if (pending_index_.size() >= pending_cap_) {
      // Buffer full: drop the incoming block rather than track arrival order.
      res.verdict = Verdict::rejected;
      res.reason = Reason::missing_parent;
      return res;
    }
    res.verdict = Verdict::buffered;
    res.reason = Reason::missing_parent;
    pending_index_.emplace(hash, block->prev);
    waiters_[block->prev].push_back({std::move(block), hash});
    return res;
  }
  res.accepted.push_back(store(std::move(block), hash, *parent_id));
  std::vector<HashValue> work{hash};
  while (!work.empty()) {
    HashValue h = work.back();
    work.pop_back();
    auto it = waiters_.find(h);
    if (it == waiters_.end()) continue;
    auto children = std::move(it->second);
    waiters_.erase(it);
    LocalId pid = index_.at(h);
    for (auto& c : children) {
      pending_index_.erase(c.hash);
      res.accepted.push_back(store(std::move(c.block), c.hash, pid));
      work.push_back(c.hash);
    }
  }
  return res;
}

InsertResult process_block(Store& store, const Oracle& oracle, const ProtocolParams& params, BlockPtr block,
                           const HashValue& hash, std::size_t max_block_bytes) {
  if (params.k != 1) throw ConfigError("the single-chain reference requires k = 1");
  InsertResult res;
  res.verdict = Verdict::rejected;
  if (!block) {
    res.reason = Reason::bad_hash;
    return res;
  }
  if (store.contains(hash) || store.is_pending(hash)) {
    res.verdict = Verdict::duplicate;
    res.reason = Reason::duplicate;
    return res;
  }
  if (serialized_size(*block) > max_block_bytes) {
    res.reason = Reason::oversize;
    return res;
  }
  if (hash.bit_width() != params.lambda || !is_pow_valid(hash, params)) {
    res.reason = Reason::bad_pow;
    return res;
  }
  if (!oracle.verify(hash_block(*block, params.lambda), hash)) {
    res.reason = Reason::bad_hash;
    return res;
  }
  return store.insert(std::move(block), hash);
}

Block assemble_candidate(const Store& store, Bytes payload, const Nonce& nonce, std::size_t max_block_bytes) {
  Block b;
  b.transactions = std::move(payload);
  b.prev = store.hash(store.tip());
  b.nonce = nonce;
  if (serialized_size(b) > max_block_bytes) throw std::length_error("payload exceeds block size");
  return b;
}

}  // namespace parchain::nakamoto
