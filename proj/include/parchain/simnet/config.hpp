#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "parchain/block.hpp"
#include "parchain/chainstore.hpp"
#include "parchain/params.hpp"

namespace parchain::simnet {

enum class Protocol { parallel, nakamoto };

std::string_view to_string(Protocol p);
Protocol protocol_from_string(std::string_view name);

struct AdversaryConfig {
  std::string strategy = "honest_shadow";
  nlohmann::json options = nlohmann::json::object();
};

struct SimConfig {
  ProtocolParams params;
  Protocol protocol = Protocol::parallel;
  std::uint64_t n = 20;
  double f = 0.0;
  std::uint64_t delta = 10;
  std::uint64_t ticks = 10000;
  std::uint64_t seed = 1;
  std::uint64_t checkpoint_every = 0;  // 0: max(1, ticks / 100)
  std::uint64_t trace_every = 0;       // 0: a tenth of the growth window
  std::size_t payload_bytes = 256;
  std::size_t max_block_bytes = kDefaultMaxBlockBytes;
  std::size_t pending_cap = ChainStore::kDefaultPendingCap;
  AdversaryConfig adversary;

  std::uint64_t honest_nodes() const;
  /// Adversary queries per tick: floor(f n).
  std::uint64_t adversary_budget() const;
  /// Ticks in which each chain should grow by T blocks: ceil(2T / (p n)).
  std::uint64_t growth_window() const;
  std::uint64_t checkpoint_interval() const;
  std::uint64_t trace_interval() const;

  void validate() const;
};

nlohmann::json to_json(const SimConfig& config);
/// Reads a config object. Missing fields keep their defaults; p defaults to
/// 1 / (c delta n). f may be a number or a "a/b" string.
SimConfig sim_config_from_json(const nlohmann::json& j);
SimConfig load_sim_config(const std::string& path);

}  // namespace parchain::simnet
