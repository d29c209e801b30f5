#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace parchain {

/// Thrown for invalid protocol or simulation configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr unsigned kMaxHashBits = 256;
inline constexpr unsigned kChainSelectorBits = 48;

/// Fixed-width digest of `bit_width()` bits (a multiple of 8, at most 256).
/// Bits are numbered most-significant first; unused storage stays zero so
/// comparisons and hashing ignore it.
class HashValue {
 public:
  HashValue() = default;
  explicit HashValue(unsigned bits);

  static HashValue from_bytes(std::span<const std::uint8_t> bytes, unsigned bits);
  static std::optional<HashValue> from_hex(std::string_view hex);

  unsigned bit_width() const { return bits_; }
  std::size_t byte_size() const { return bits_ / 8; }
  std::span<const std::uint8_t> bytes() const { return {bytes_.data(), byte_size()}; }
  std::span<std::uint8_t> mutable_bytes() { return {bytes_.data(), byte_size()}; }

  bool bit(unsigned index) const;
  void set_bit(unsigned index, bool value);
  unsigned leading_zero_bits() const;
  /// Integer formed by the last `count` bits (count <= 64).
  std::uint64_t trailing_bits(unsigned count) const;
  void set_trailing_bits(unsigned count, std::uint64_t value);

  bool is_zero() const;
  std::string hex() const;

  friend auto operator<=>(const HashValue&, const HashValue&) = default;
  friend bool operator==(const HashValue&, const HashValue&) = default;

 private:
  std::array<std::uint8_t, kMaxHashBits / 8> bytes_{};
  std::uint16_t bits_ = kMaxHashBits;
};

struct HashValueHasher {
  std::size_t operator()(const HashValue& h) const noexcept;
};

}  // namespace parchain
