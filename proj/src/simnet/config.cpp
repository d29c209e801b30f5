#include "parchain/simnet/config.hpp"

#include <cmath>
#include <fstream>

namespace parchain::simnet {

using nlohmann::json;

std::string_view to_string(Protocol p) { return p == Protocol::parallel ? "parallel" : "nakamoto"; }

Protocol protocol_from_string(std::string_view name) {
  if (name == "parallel") return Protocol::parallel;
  if (name == "nakamoto") return Protocol::nakamoto;
  throw ConfigError("unknown protocol '" + std::string(name) + "'");
}

std::uint64_t SimConfig::honest_nodes() const {
  return static_cast<std::uint64_t>(std::llround(static_cast<double>(n) * (1.0 - f)));
}

std::uint64_t SimConfig::adversary_budget() const {
  // The epsilon keeps f = 1/3, n = 30 at 10 instead of 9.
  return static_cast<std::uint64_t>(std::floor(f * static_cast<double>(n) + 1e-9));
}

std::uint64_t SimConfig::growth_window() const {
  return static_cast<std::uint64_t>(std::ceil(2.0 * params.T / (params.p * static_cast<double>(n)) - 1e-9));
}

std::uint64_t SimConfig::checkpoint_interval() const {
  if (checkpoint_every > 0) return checkpoint_every;
  return std::max<std::uint64_t>(1, ticks / 100);
}

std::uint64_t SimConfig::trace_interval() const {
  if (trace_every > 0) return trace_every;
  return std::max<std::uint64_t>(1, growth_window() / 10);
}

void SimConfig::validate() const {
  params.validate();
  if (n == 0) throw ConfigError("n must be positive");
  if (!(f >= 0.0) || f >= 0.5) throw ConfigError("f must lie in [0, 1/2)");
  if (delta == 0) throw ConfigError("delta must be at least 1");
  if (ticks == 0) throw ConfigError("ticks must be positive");
  if (honest_nodes() == 0) throw ConfigError("no honest nodes");
  if (protocol == Protocol::nakamoto && params.k != 1) throw ConfigError("the nakamoto protocol requires k = 1");
  std::size_t overhead = 1 + 4 * 8 + 2 * (params.lambda / 8) + sizeof(Nonce);
  if (payload_bytes + overhead > max_block_bytes) throw ConfigError("payload does not fit the block size limit");
  if (pending_cap == 0) throw ConfigError("pending_cap must be positive");
}

namespace {

double parse_fraction(const json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    auto s = v.get<std::string>();
    auto slash = s.find('/');
    try {
      if (slash == std::string::npos) return std::stod(s);
      return std::stod(s.substr(0, slash)) / std::stod(s.substr(slash + 1));
    } catch (const std::exception&) {
      throw ConfigError("cannot parse fraction '" + s + "'");
    }
  }
  throw ConfigError("fraction must be a number or an \"a/b\" string");
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

json to_json(const SimConfig& c) {
  return {
      {"protocol", to_string(c.protocol)},
      {"params",
       {{"k", c.params.k},
        {"p", c.params.p},
        {"c", c.params.c},
        {"lambda", c.params.lambda},
        {"T", c.params.T},
        {"mode", to_string(c.params.mode)}}},
      {"n", c.n},
      {"f", c.f},
      {"delta", c.delta},
      {"ticks", c.ticks},
      {"seed", c.seed},
      {"checkpoint_every", c.checkpoint_interval()},
      {"trace_every", c.trace_interval()},
      {"payload_bytes", c.payload_bytes},
      {"max_block_bytes", c.max_block_bytes},
      {"pending_cap", c.pending_cap},
      {"adversary", {{"strategy", c.adversary.strategy}, {"options", c.adversary.options}}},
  };
}

SimConfig sim_config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  SimConfig c;
  try {
    if (j.contains("protocol")) c.protocol = protocol_from_string(j.at("protocol").get<std::string>());
    read(j, "n", c.n);
    if (j.contains("f")) c.f = parse_fraction(j.at("f"));
    read(j, "delta", c.delta);
    read(j, "ticks", c.ticks);
    read(j, "seed", c.seed);
    read(j, "checkpoint_every", c.checkpoint_every);
    read(j, "trace_every", c.trace_every);
    read(j, "payload_bytes", c.payload_bytes);
    read(j, "max_block_bytes", c.max_block_bytes);
    read(j, "pending_cap", c.pending_cap);
    bool have_p = false;
    if (j.contains("params")) {
      const auto& p = j.at("params");
      read(p, "k", c.params.k);
      read(p, "c", c.params.c);
      read(p, "lambda", c.params.lambda);
      read(p, "T", c.params.T);
      if (p.contains("mode")) c.params.mode = mining_mode_from_string(p.at("mode").get<std::string>());
      if (p.contains("p")) {
        c.params.p = parse_fraction(p.at("p"));
        have_p = true;
      }
    }
    if (!have_p) c.params.p = ProtocolParams::p_for(c.params.c, c.delta, c.n);
    if (j.contains("adversary")) {
      const auto& a = j.at("adversary");
      if (a.is_string()) {
        c.adversary.strategy = a.get<std::string>();
      } else {
        read(a, "strategy", c.adversary.strategy);
        if (a.contains("options")) c.adversary.options = a.at("options");
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config field: ") + e.what());
  }
  c.validate();
  return c;
}

SimConfig load_sim_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config " + path + " is not valid JSON: " + e.what());
  }
  return sim_config_from_json(j);
}

}  // namespace parchain::simnet
