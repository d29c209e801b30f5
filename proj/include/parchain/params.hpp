#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace parchain {

enum class MiningMode { real_hash, oracle };

std::string_view to_string(MiningMode mode);
MiningMode mining_mode_from_string(std::string_view name);

/// Protocol constants (k, p, lambda, T) plus the block-interval multiplier c.
struct ProtocolParams {
  std::uint32_t k = 1;
  double p = 1.0 / 1024.0;
  unsigned lambda = 256;
  std::uint32_t T = 6;
  std::uint32_t c = 5;
  MiningMode mode = MiningMode::oracle;

  /// Required leading-zero count: log2(1/(k p)) rounded, at least 1.
  unsigned difficulty() const;
  /// Per-query probability that a query yields a valid block on some chain.
  double success_probability() const;

  /// Throws ConfigError when the constants violate the protocol invariants.
  void validate() const;

  /// p chosen from the network constants: 1 / (c * delta * n).
  static double p_for(std::uint32_t c, std::uint64_t delta, std::uint64_t n);
};

}  // namespace parchain
