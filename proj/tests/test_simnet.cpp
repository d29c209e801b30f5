#include <doctest.h>

#include <set>
#include <sstream>
#include <tuple>

#include "parchain/simnet/adversary.hpp"
#include "parchain/simnet/engine.hpp"
#include "support/sim.hpp"

using namespace parchain;
using namespace parchain::simnet;
using parchain::testing::dump_without_timestamp;
using parchain::testing::small_config;

namespace {

/// Header layouts differ between the protocols, so blocks are identified by
/// their mining event rather than by hash.
using MiningEvent = std::tuple<std::int32_t, std::uint64_t, std::uint64_t, std::uint32_t>;

std::vector<MiningEvent> events(const RunReport& r, const Snapshot& s) {
  std::vector<MiningEvent> out;
  for (auto g : r.trie.sequence(s.trie_node)) {
    const auto& b = r.blocks[g];
    out.emplace_back(b.origin, b.mined_tick, b.height, b.parent);
  }
  return out;
}

}  // namespace

TEST_CASE("no adversary, one chain, delta 1: SCB is the chain minus its last T blocks") {
  auto c = small_config(1, 0.0, "honest_shadow", 3000);
  c.delta = 1;
  c.params.p = ProtocolParams::p_for(5, c.delta, c.n);
  auto r = run(c);
  REQUIRE(r.counters.honest_blocks > 100);
  CHECK(r.counters.adversary_blocks == 0);
  for (std::uint32_t u = 0; u < r.honest_nodes; ++u) {
    const auto& snap = r.final_snapshot(u);
    auto path = r.path_to(snap.tips[0]);
    REQUIRE(path.size() > c.params.T);
    path.resize(path.size() - c.params.T);
    CHECK(r.trie.sequence(snap.trie_node) == path);
  }
}

TEST_CASE("a run is a pure function of its config") {
  for (const char* strategy : {"honest_shadow", "withholder", "trailing_liar", "chain_focus"}) {
    CAPTURE(strategy);
    auto c = small_config(4, 0.3, strategy, 3000, 7);
    CHECK(dump_without_timestamp(run(c)) == dump_without_timestamp(run(c)));
  }
  auto a = small_config(4, 0.2, "withholder", 2000, 1);
  auto b = a;
  b.seed = 2;
  CHECK(dump_without_timestamp(run(a)) != dump_without_timestamp(run(b)));
}

TEST_CASE("delivery bound, query budget and clean counters under every strategy") {
  for (std::uint32_t k : {1u, 4u, 16u}) {
    for (const char* strategy : {"honest_shadow", "withholder", "trailing_liar", "chain_focus"}) {
      CAPTURE(k);
      CAPTURE(strategy);
      auto c = small_config(k, 0.35, strategy, 4000, k);
      auto r = run(c);
      CHECK(r.adversary_budget == 3);
      CHECK(r.counters.max_honest_delay <= c.delta);
      CHECK(r.counters.max_adversary_queries_per_tick <= r.adversary_budget);
      CHECK(r.counters.adversary_queries == r.adversary_budget * c.ticks);
      CHECK(r.counters.attachment_mismatches == 0);
      CHECK(r.counters.catchup_violations == 0);
      CHECK(r.counters.tracker_mismatches == 0);
      CHECK(r.counters.adversary_published <= r.counters.adversary_blocks);
      CHECK(r.snapshots.size() == r.honest_nodes * (c.checkpoint_interval() > 0 ? c.ticks / c.checkpoint_interval() : 0));
    }
  }
}

TEST_CASE("honest_shadow delays every honest block by exactly delta") {
  auto r = run(small_config(4, 0.2, "honest_shadow", 2000));
  CHECK(r.counters.max_honest_delay == 4);
  for (const auto& b : r.blocks) {
    if (b.honest()) CHECK(b.published_tick == b.mined_tick);
  }
}

TEST_CASE("honest node count and adversary budget") {
  SimConfig c;
  c.n = 30;
  c.f = 1.0 / 3.0;
  CHECK(c.honest_nodes() == 20);
  CHECK(c.adversary_budget() == 10);
  c.n = 20;
  c.f = 0.25;
  CHECK(c.honest_nodes() == 15);
  CHECK(c.adversary_budget() == 5);
  c.f = 0.35;
  CHECK(c.honest_nodes() == 13);
  CHECK(c.adversary_budget() == 7);
}

TEST_CASE("k = 1 parallel chains match the single-chain reference snapshot for snapshot") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    CAPTURE(seed);
    auto c = small_config(1, 0.3, "withholder", 5000, seed);
    auto par = run(c);
    c.protocol = Protocol::nakamoto;
    auto nak = run(c);
    REQUIRE(par.snapshots.size() == nak.snapshots.size());
    REQUIRE(par.counters.adversary_published > 0);
    for (std::size_t i = 0; i < par.snapshots.size(); ++i) {
      CHECK(par.snapshots[i].tick == nak.snapshots[i].tick);
      CHECK(events(par, par.snapshots[i]) == events(nak, nak.snapshots[i]));
    }
    for (std::uint32_t u = 0; u < nak.honest_nodes; ++u) {
      const auto& snap = nak.final_snapshot(u);
      auto path = nak.path_to(snap.tips[0]);
      path.resize(path.size() > c.params.T ? path.size() - c.params.T : 0);
      CHECK(nak.trie.sequence(snap.trie_node) == path);
    }
  }
}

TEST_CASE("chain_focus only ever publishes on its target chain") {
  auto c = small_config(4, 0.3, "chain_focus", 4000);
  c.adversary.options = {{"target_chain", 2}};
  auto r = run(c);
  REQUIRE(r.counters.adversary_published > 0);
  CHECK(r.counters.adversary_published < r.counters.adversary_blocks);
  for (const auto& b : r.blocks) {
    if (!b.honest() && !b.genesis()) CHECK(b.chain == 2);
  }
}

TEST_CASE("withholder releases blocks only after an honest block on the same chain") {
  auto r = run(small_config(4, 0.3, "withholder", 4000));
  REQUIRE(r.counters.adversary_published > 0);
  std::size_t delayed = 0;
  for (const auto& b : r.blocks) {
    if (!b.honest() && !b.genesis()) {
      CHECK(b.published_tick > b.mined_tick);
      delayed += b.published_tick > b.mined_tick + 1;
    }
  }
  CHECK(delayed > 0);
}

TEST_CASE("trailing_liar bursts are tracked and every lagging chain catches up") {
  auto c = small_config(4, 0.3, "trailing_liar", 20000);
  c.adversary.options = {{"burst_ticks", 400}, {"pause_ticks", 1600}};
  auto r = run(c);
  REQUIRE(r.bursts.size() >= 9);
  std::size_t lagging = 0;
  for (const auto& b : r.bursts) {
    CHECK(b.outcome != "violated");
    if (b.outcome == "caught_up") {
      ++lagging;
      CHECK(b.min_catchup_rank + 1 >= b.reference_rank);
      CHECK(b.resolved_tick >= b.end_tick + c.delta);
    }
  }
  CHECK(lagging > 0);
  CHECK(r.counters.catchup_violations == 0);
}

TEST_CASE("latency records: partial confirmation never comes after full confirmation") {
  auto r = run(small_config(4, 0.2, "withholder", 4000));
  std::size_t full = 0;
  for (const auto& b : r.blocks) {
    if (b.genesis()) continue;
    CHECK(b.full.nodes <= r.honest_nodes);
    if (b.full.nodes > 0) {
      ++full;
      CHECK(b.partial.nodes >= b.full.nodes);
      CHECK(b.partial.first <= b.full.first);
      CHECK(b.full.first >= b.mined_tick);
    }
  }
  CHECK(full > 50);
}

TEST_CASE("real-hash mining runs the same protocol") {
  auto c = small_config(2, 0.2, "withholder", 2000);
  c.params.mode = MiningMode::real_hash;
  c.params.lambda = 128;
  c.params.p = 1.0 / 256;  // k p = 2^-7
  auto r = run(c);
  CHECK(r.counters.honest_blocks > 20);
  CHECK(r.counters_clean());
}

TEST_CASE("report JSON round trip") {
  auto c = small_config(4, 0.3, "trailing_liar", 3000);
  c.adversary.options = {{"burst_ticks", 200}, {"pause_ticks", 300}};
  auto r = run(c);
  r.generated_at = "2026-01-01T00:00:00Z";
  auto j = to_json(r);
  auto back = report_from_json(nlohmann::json::parse(j.dump()));
  CHECK(to_json(back) == j);
}

TEST_CASE("trace CSV and SCB JSONL layout") {
  auto r = run(small_config(2, 0.2, "withholder", 2000));
  std::ostringstream csv;
  write_trace_csv(r, csv);
  std::istringstream in(csv.str());
  std::string header;
  std::getline(in, header);
  std::size_t columns = std::count(header.begin(), header.end(), ',') + 1;
  CHECK(columns == 1 + 2 * 2 + 2 * r.honest_nodes + 2);
  std::size_t rows = 0;
  for (std::string line; std::getline(in, line); ++rows) {
    CHECK(static_cast<std::size_t>(std::count(line.begin(), line.end(), ',') + 1) == columns);
  }
  CHECK(rows == r.trace.size());

  std::ostringstream jl;
  write_scb_jsonl(r, jl);
  std::istringstream lines(jl.str());
  std::size_t entries = 0;
  std::uint64_t last_rank = 0;
  for (std::string line; std::getline(lines, line); ++entries) {
    auto e = nlohmann::json::parse(line);
    CHECK(e.at("rank").get<std::uint64_t>() >= last_rank);
    last_rank = e["rank"];
  }
  CHECK(entries == r.trie.sequence(r.final_snapshot(0).trie_node).size());
}

TEST_CASE("SCB trie shares prefixes and answers prefix queries") {
  ScbTrie t;
  auto a = t.child(0, 5);
  auto ab = t.child(a, 7);
  auto ac = t.child(a, 9);
  CHECK(t.child(0, 5) == a);
  CHECK(t.child(a, 7) == ab);
  CHECK(t.sequence(ab) == std::vector<std::uint32_t>{5, 7});
  CHECK(t.depth(ac) == 2);

  Rng rng(3);
  std::vector<std::uint32_t> nodes{0};
  for (int i = 0; i < 300; ++i) {
    auto parent = nodes[rng() % nodes.size()];
    nodes.push_back(t.child(parent, static_cast<std::uint32_t>(rng() % 4)));
  }
  std::vector<std::uint32_t> enter, exit;
  t.euler(enter, exit);
  for (int i = 0; i < 2000; ++i) {
    auto x = nodes[rng() % nodes.size()];
    auto y = nodes[rng() % nodes.size()];
    auto sx = t.sequence(x), sy = t.sequence(y);
    bool brute = sx.size() <= sy.size() && std::equal(sx.begin(), sx.end(), sy.begin());
    CHECK((enter[x] <= enter[y] && exit[y] <= exit[x]) == brute);
  }
}

TEST_CASE("configuration errors") {
  auto c = small_config(4, 0.2, "withholder");
  c.protocol = Protocol::nakamoto;
  CHECK_THROWS_AS(run(c), ConfigError);
  c = small_config(1, 0.2, "chain_focus");
  c.protocol = Protocol::nakamoto;
  CHECK_THROWS_AS(run(c), ConfigError);
  c = small_config(4, 0.2, "no_such_strategy");
  CHECK_THROWS_AS(run(c), ConfigError);
  c = small_config(4, 0.5, "withholder");
  CHECK_THROWS_AS(run(c), ConfigError);
  c = small_config(4, 0.2, "chain_focus");
  c.adversary.options = {{"target_chain", 9}};
  CHECK_THROWS_AS(run(c), ConfigError);
  c = small_config(4, 0.2, "withholder");
  c.payload_bytes = c.max_block_bytes;
  CHECK_THROWS_AS(run(c), ConfigError);
}

TEST_CASE("config JSON: defaults, fractions and derived p") {
  auto c = sim_config_from_json(nlohmann::json::parse(R"({"n": 30, "f": "1/3", "delta": 10,
      "params": {"k": 8, "c": 5, "T": 30}, "adversary": {"strategy": "chain_focus"}})"));
  CHECK(c.f == doctest::Approx(1.0 / 3.0));
  CHECK(c.params.p == doctest::Approx(1.0 / 1500.0));
  CHECK(c.growth_window() == 3000);
  CHECK(c.adversary.strategy == "chain_focus");
  auto back = sim_config_from_json(to_json(c));
  CHECK(to_json(back) == to_json(c));
  CHECK_THROWS_AS(sim_config_from_json(nlohmann::json::parse(R"({"f": "x/y"})")), ConfigError);
  CHECK_THROWS_AS(sim_config_from_json(nlohmann::json::parse(R"({"n": "many"})")), ConfigError);
}
