#include "parchain/hash_value.hpp"

#include <algorithm>
#include <bit>
#include <cstring>

namespace parchain {

namespace {

void check_width(unsigned bits) {
  if (bits == 0 || bits > kMaxHashBits || bits % 8 != 0) {
    throw std::invalid_argument("hash width must be a positive multiple of 8 up to 256, got " +
                                std::to_string(bits));
  }
}

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

HashValue::HashValue(unsigned bits) : bits_(static_cast<std::uint16_t>(bits)) { check_width(bits); }

HashValue HashValue::from_bytes(std::span<const std::uint8_t> bytes, unsigned bits) {
  HashValue h(bits);
  if (bytes.size() < h.byte_size()) throw std::invalid_argument("not enough bytes for hash width");
  std::copy_n(bytes.begin(), h.byte_size(), h.bytes_.begin());
  return h;
}

std::optional<HashValue> HashValue::from_hex(std::string_view hex) {
  if (hex.empty() || hex.size() % 2 != 0 || hex.size() > 2 * kMaxHashBits / 8) return std::nullopt;
  HashValue h(static_cast<unsigned>(hex.size() * 4));
  for (std::size_t i = 0; i < hex.size() / 2; ++i) {
    int hi = hex_digit(hex[2 * i]);
    int lo = hex_digit(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    h.bytes_[i] = static_cast<std::uint8_t>(hi << 4 | lo);
  }
  return h;
}

bool HashValue::bit(unsigned index) const {
  return (bytes_[index / 8] >> (7 - index % 8)) & 1U;
}

void HashValue::set_bit(unsigned index, bool value) {
  auto mask = static_cast<std::uint8_t>(1U << (7 - index % 8));
  if (value) {
    bytes_[index / 8] |= mask;
  } else {
    bytes_[index / 8] &= static_cast<std::uint8_t>(~mask);
  }
}

unsigned HashValue::leading_zero_bits() const {
  unsigned count = 0;
  for (std::size_t i = 0; i < byte_size(); ++i) {
    if (bytes_[i] == 0) {
      count += 8;
      continue;
    }
    return count + static_cast<unsigned>(std::countl_zero(bytes_[i]));
  }
  return count;
}

std::uint64_t HashValue::trailing_bits(unsigned count) const {
  std::uint64_t v = 0;
  for (unsigned i = bits_ - count; i < bits_; ++i) v = (v << 1) | (bit(i) ? 1U : 0U);
  return v;
}

void HashValue::set_trailing_bits(unsigned count, std::uint64_t value) {
  for (unsigned j = 0; j < count; ++j) set_bit(bits_ - 1 - j, (value >> j) & 1U);
}

bool HashValue::is_zero() const {
  return std::all_of(bytes_.begin(), bytes_.begin() + static_cast<std::ptrdiff_t>(byte_size()),
                     [](std::uint8_t b) { return b == 0; });
}

std::string HashValue::hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * byte_size());
  for (std::size_t i = 0; i < byte_size(); ++i) {
    out.push_back(kDigits[bytes_[i] >> 4]);
    out.push_back(kDigits[bytes_[i] & 0xF]);
  }
  return out;
}

std::size_t HashValueHasher::operator()(const HashValue& h) const noexcept {
  // Leading bytes of valid hashes are zero, so mix the tail.
  auto bytes = h.bytes();
  std::uint64_t acc = 0xcbf29ce484222325ULL ^ h.bit_width();
  std::size_t start = bytes.size() > 16 ? bytes.size() - 16 : 0;
  for (std::size_t i = start; i < bytes.size(); ++i) acc = (acc ^ bytes[i]) * 0x100000001b3ULL;
  return static_cast<std::size_t>(acc);
}

}  // namespace parchain
