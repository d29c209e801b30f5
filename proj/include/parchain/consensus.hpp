#pragma once

#include <cstdint>
#include <vector>

#include "parchain/block.hpp"
#include "parchain/chainstore.hpp"
#include "parchain/hash_oracle.hpp"
#include "parchain/params.hpp"

namespace parchain {

using ProcessResult = InsertResult;

/// Full verification of a received block followed by storage. Checks run in
/// order: size, proof of work, hash recomputation, Merkle leaf proof; parent
/// and trailing resolution happen in the store. Supplied ranks are ignored.
ProcessResult process_block(ChainStore& store, const Oracle& oracle, const ProtocolParams& params, BlockPtr block,
                            Attachment attachment, std::size_t max_block_bytes = kDefaultMaxBlockBytes);

/// Candidate committing to every current chain tip. Throws std::length_error
/// when the serialized block would exceed max_block_bytes.
Block assemble_candidate(const ChainStore& store, Bytes payload, const Nonce& nonce,
                         std::size_t max_block_bytes = kDefaultMaxBlockBytes);

struct MinedBlock {
  BlockPtr block;
  Attachment attachment;
};

/// Builds the attachment for a solved candidate and stores it locally. The
/// candidate must have been assembled from the store's current state. Throws
/// std::logic_error if h fails the PoW check or self-processing is refused.
MinedBlock on_mining_success(ChainStore& store, const Oracle& oracle, const ProtocolParams& params, Block candidate,
                             const HashValue& h, std::size_t max_block_bytes = kDefaultMaxBlockBytes);

struct ScbEntry {
  HashValue block_hash;
  std::uint64_t rank = 0;
  std::uint32_t chain_id = 0;
  friend bool operator==(const ScbEntry&, const ScbEntry&) = default;
};

struct ConfirmView {
  std::vector<std::uint64_t> y;
  std::uint64_t confirm_bar = 1;
};

ConfirmView confirm_view(const ChainStore& store, std::uint32_t T);

/// Confirmed blocks in total order, recomputed from the current paths. Empty
/// until every chain has at least one partially-confirmed block.
std::vector<ScbEntry> output_scb(const ChainStore& store, std::uint32_t T);

}  // namespace parchain
