#include "parchain/params.hpp"

#include <bit>
#include <cmath>

#include "parchain/hash_value.hpp"

namespace parchain {

std::string_view to_string(MiningMode mode) {
  return mode == MiningMode::real_hash ? "real_hash" : "oracle";
}

MiningMode mining_mode_from_string(std::string_view name) {
  if (name == "real_hash") return MiningMode::real_hash;
  if (name == "oracle") return MiningMode::oracle;
  throw ConfigError("unknown mining mode '" + std::string(name) + "'");
}

unsigned ProtocolParams::difficulty() const {
  double exact = std::log2(1.0 / (static_cast<double>(k) * p));
  long rounded = std::lround(exact);
  return rounded < 1 ? 1U : static_cast<unsigned>(rounded);
}

double ProtocolParams::success_probability() const {
  double kp = static_cast<double>(k) * p;
  return kp > 1.0 ? 1.0 : kp;
}

void ProtocolParams::validate() const {
  if (k < 1) throw ConfigError("k must be at least 1");
  if (T < 1) throw ConfigError("T must be at least 1");
  if (c < 1) throw ConfigError("c must be at least 1");
  if (!(p > 0.0) || p > 1.0) throw ConfigError("p must lie in (0, 1]");
  if (static_cast<double>(k) * p > 1.0 + 1e-12) throw ConfigError("k*p must not exceed 1");
  if (lambda % 8 != 0 || lambda < kChainSelectorBits + 8 || lambda > kMaxHashBits) {
    throw ConfigError("lambda must be a multiple of 8 in [56, 256]");
  }
  unsigned d = difficulty();
  unsigned selector = k == 1 ? 0U : static_cast<unsigned>(std::bit_width(k - 1U));
  if (d + selector > lambda) throw ConfigError("d + ceil(log2 k) exceeds lambda");
  if (d + kChainSelectorBits > lambda) {
    throw ConfigError("leading-zero prefix overlaps the 48-bit chain selector");
  }
  if (mode == MiningMode::real_hash) {
    double exact = std::log2(1.0 / (static_cast<double>(k) * p));
    if (std::abs(exact - std::round(exact)) > 1e-9 || exact < 1.0 - 1e-9) {
      throw ConfigError("real_hash mode needs log2(1/(k p)) to be a positive integer");
    }
  }
}

double ProtocolParams::p_for(std::uint32_t c, std::uint64_t delta, std::uint64_t n) {
  if (c == 0 || delta == 0 || n == 0) throw ConfigError("c, delta and n must be positive");
  return 1.0 / (static_cast<double>(c) * static_cast<double>(delta) * static_cast<double>(n));
}

}  // namespace parchain
