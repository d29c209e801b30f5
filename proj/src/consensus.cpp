#include "parchain/consensus.hpp"

#include <algorithm>
#include <stdexcept>
#include <tuple>

namespace parchain {

ProcessResult process_block(ChainStore& store, const Oracle& oracle, const ProtocolParams& params, BlockPtr block,
                            Attachment attachment, std::size_t max_block_bytes) {
  auto reject = [](Reason r) {
    ProcessResult res;
    res.verdict = Verdict::rejected;
    res.reason = r;
    return res;
  };
  if (!block) return reject(Reason::bad_hash);
  if (store.contains(attachment.hash) || store.is_pending(attachment.hash)) {
    ProcessResult res;
    res.verdict = Verdict::duplicate;
    res.reason = Reason::duplicate;
    return res;
  }
  if (serialized_size(*block) > max_block_bytes) return reject(Reason::oversize);
  if (attachment.hash.bit_width() != params.lambda || !is_pow_valid(attachment.hash, params)) {
    return reject(Reason::bad_pow);
  }
  if (!oracle.verify(hash_block(*block, params.lambda), attachment.hash)) return reject(Reason::bad_hash);
  std::uint32_t i = chain_index(attachment.hash, params.k);
  if (block->root.bit_width() != params.lambda || !verify(block->root, i, attachment.leaf, attachment.leaf_proof)) {
    return reject(Reason::bad_proof);
  }
  return store.insert(std::move(block), std::move(attachment));
}

Block assemble_candidate(const ChainStore& store, Bytes payload, const Nonce& nonce, std::size_t max_block_bytes) {
  Block b;
  b.transactions = std::move(payload);
  b.root = store.merkle().root();
  b.trailing = store.trailing_hash();
  b.nonce = nonce;
  if (serialized_size(b) > max_block_bytes) throw std::length_error("payload exceeds block size");
  return b;
}

MinedBlock on_mining_success(ChainStore& store, const Oracle& oracle, const ProtocolParams& params, Block candidate,
                             const HashValue& h, std::size_t max_block_bytes) {
  if (!is_pow_valid(h, params)) throw std::logic_error("mining success with a hash that fails the PoW check");
  std::uint32_t i = chain_index(h, params.k);
  const MerkleTree& tree = store.merkle();
  Attachment a;
  a.hash = h;
  a.leaf = tree.leaf(i);
  a.leaf_proof = tree.prove(i);
  auto block = std::make_shared<const Block>(std::move(candidate));
  auto res = process_block(store, oracle, params, block, a, max_block_bytes);
  if (res.verdict != Verdict::accepted) {
    throw std::logic_error("self-processing of a mined block failed: " + std::string(to_string(res.reason)));
  }
  const auto& stored = store.at(res.accepted.front()).attachment;
  a.rank = stored.rank;
  a.next_rank = stored.next_rank;
  return {std::move(block), std::move(a)};
}

ConfirmView confirm_view(const ChainStore& store, std::uint32_t T) {
  ConfirmView v;
  v.y.resize(store.chain_count(), 1);
  v.confirm_bar = ~std::uint64_t{0};
  for (std::uint32_t i = 0; i < store.chain_count(); ++i) {
    auto partial = store.partially_confirmed(i, T);
    if (!partial.empty()) v.y[i] = store.next_rank(partial.back());
    v.confirm_bar = std::min(v.confirm_bar, v.y[i]);
  }
  return v;
}

std::vector<ScbEntry> output_scb(const ChainStore& store, std::uint32_t T) {
  std::uint64_t bar = confirm_view(store, T).confirm_bar;
  std::vector<std::vector<LocalId>> partial;
  for (std::uint32_t i = 0; i < store.chain_count(); ++i) {
    partial.push_back(store.partially_confirmed(i, T));
    // A chain with nothing confirmed holds the whole sequence back, genesis
    // blocks included; otherwise genesis blocks would appear chain by chain.
    if (partial.back().empty()) return {};
  }
  std::vector<ScbEntry> out;
  for (std::uint32_t i = 0; i < store.chain_count(); ++i) {
    for (LocalId id : partial[i]) {
      if (store.rank(id) < bar) out.push_back({store.hash(id), store.rank(id), i});
    }
  }
  std::sort(out.begin(), out.end(),
            [](const ScbEntry& a, const ScbEntry& b) { return std::tie(a.rank, a.chain_id) < std::tie(b.rank, b.chain_id); });
  return out;
}

}  // namespace parchain
