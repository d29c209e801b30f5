#include "parchain/block.hpp"

#include <string>

namespace parchain {

void append_u64le(Bytes& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void append_field(Bytes& out, std::span<const std::uint8_t> field) {
  append_u64le(out, field.size());
  out.insert(out.end(), field.begin(), field.end());
}

std::size_t serialized_size(const Block& block) {
  return 1 + 4 * 8 + block.transactions.size() + block.root.byte_size() + block.trailing.byte_size() +
         block.nonce.size();
}

Bytes serialize(const Block& block) {
  Bytes out;
  out.reserve(serialized_size(block));
  out.push_back(domain::block);
  append_field(out, block.transactions);
  append_field(out, block.root.bytes());
  append_field(out, block.trailing.bytes());
  append_field(out, block.nonce);
  return out;
}

Block make_genesis(std::uint32_t chain, unsigned lambda) {
  Block g;
  std::string tag = "genesis-" + std::to_string(chain);
  g.transactions.assign(tag.begin(), tag.end());
  g.root = HashValue(lambda);
  g.trailing = HashValue(lambda);
  return g;
}

}  // namespace parchain
