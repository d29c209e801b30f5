#pragma once

#include <string>

#include "parchain/simnet/config.hpp"
#include "parchain/simnet/report.hpp"

namespace parchain::testing {

/// Small, fast simulation with p = 1 / (c delta n).
inline simnet::SimConfig small_config(std::uint32_t k, double f, const std::string& strategy,
                                      std::uint64_t ticks = 4000, std::uint64_t seed = 1) {
  simnet::SimConfig c;
  c.params.k = k;
  c.params.T = 6;
  c.n = 10;
  c.f = f;
  c.delta = 4;
  c.params.c = 5;
  c.params.p = ProtocolParams::p_for(c.params.c, c.delta, c.n);
  c.ticks = ticks;
  c.seed = seed;
  c.payload_bytes = 64;
  c.adversary.strategy = strategy;
  return c;
}

inline std::string dump_without_timestamp(const simnet::RunReport& r) {
  auto j = simnet::to_json(r);
  j.erase("generated_at");
  return j.dump();
}

}  // namespace parchain::testing
