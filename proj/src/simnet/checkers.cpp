#include "parchain/simnet/checkers.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace parchain::simnet {

using nlohmann::json;

namespace {

constexpr std::size_t kMaxExamples = 10;
constexpr double kEps = 1e-9;

void note(PropertyVerdict& v, const std::string& what) {
  if (v.examples.size() < kMaxExamples) v.examples.push_back(what);
}

}  // namespace

double quality_fraction(double f) { return (1.0 - 2.0 * f) / (1.0 - f); }

PropertyVerdict check_growth(const RunReport& r) {
  PropertyVerdict v;
  v.property = "growth";
  const std::uint32_t T = r.config.params.T;
  v.threshold = T;
  const std::uint64_t te = std::max<std::uint64_t>(1, r.trace_every);
  std::vector<const TraceSample*> grid;
  for (const auto& s : r.trace) {
    if (s.tick % te == 0) grid.push_back(&s);
  }
  const std::size_t span = std::max<std::uint64_t>(1, r.growth_window / te);
  const std::uint32_t k = r.k();
  v.detail["window_ticks"] = span * te;
  for (std::size_t a = 0; a + span < grid.size(); ++a) {
    const auto& s0 = *grid[a];
    const auto& s1 = *grid[a + span];
    for (std::uint64_t u = 0; u < r.honest_nodes; ++u) {
      for (std::uint32_t i = 0; i < k; ++i) {
        auto h0 = r.blocks[s0.tips[u * k + i]].height;
        auto h1 = r.blocks[s1.tips[u * k + i]].height;
        ++v.windows;
        if (h1 < h0 + T) {
          ++v.violations;
          std::ostringstream os;
          os << "node " << u << " chain " << i << " grew " << static_cast<std::int64_t>(h1 - h0) << " in ["
             << s0.tick << ", " << s1.tick << "]";
          note(v, os.str());
        }
      }
    }
  }
  return v;
}

PropertyVerdict check_quality(const RunReport& r) {
  PropertyVerdict v;
  v.property = "quality";
  const std::uint32_t T = r.config.params.T;
  const std::uint32_t k = r.k();
  const double need = quality_fraction(r.config.f) * T;
  v.threshold = need;

  // Honest blocks from genesis up to and including each block.
  const std::size_t nb = r.blocks.size();
  std::vector<std::uint32_t> order;
  for (std::uint32_t g = 0; g < nb; ++g) {
    if (r.blocks[g].genesis() || r.blocks[g].parent != kNoId) order.push_back(g);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](auto a, auto b) { return r.blocks[a].height < r.blocks[b].height; });
  std::vector<std::uint32_t> honest_upto(nb, 0);
  for (auto g : order) {
    const auto& b = r.blocks[g];
    honest_upto[g] = (b.parent == kNoId ? 0 : honest_upto[b.parent]) + (b.honest() ? 1 : 0);
  }

  std::vector<std::uint8_t> seen(nb, 0);
  std::vector<std::uint64_t> per_windows(k, 0);
  std::vector<std::uint64_t> per_violations(k, 0);
  for (const auto& snap : r.snapshots) {
    for (std::uint32_t i = 0; i < k; ++i) {
      for (std::uint32_t end = snap.tips[i]; end != kNoId && !seen[end]; end = r.blocks[end].parent) {
        seen[end] = 1;
        if (r.blocks[end].height < T) break;
        std::uint32_t start = end;
        for (std::uint32_t s = 0; s < T; ++s) start = r.blocks[start].parent;
        auto honest = honest_upto[end] - honest_upto[start];
        ++v.windows;
        ++per_windows[i];
        if (honest + kEps < need) {
          ++v.violations;
          ++per_violations[i];
          std::ostringstream os;
          os << "chain " << i << " window ending at height " << r.blocks[end].height << " has " << honest
             << " honest of " << T;
          note(v, os.str());
        }
      }
    }
  }
  json chains = json::array();
  for (std::uint32_t i = 0; i < k; ++i) {
    chains.push_back({{"chain", i}, {"windows", per_windows[i]}, {"violations", per_violations[i]}});
  }
  v.detail["chains"] = std::move(chains);
  return v;
}

PropertyVerdict check_consistency(const RunReport& r) {
  PropertyVerdict v;
  v.property = "consistency";
  std::vector<std::uint32_t> enter;
  std::vector<std::uint32_t> exit;
  r.trie.euler(enter, exit);
  auto prefix = [&](std::uint32_t a, std::uint32_t b) { return enter[a] <= enter[b] && exit[b] <= exit[a]; };
  const auto delta = r.config.delta;
  auto must_precede = [&](const Snapshot& a, const Snapshot& b) {
    return (a.node == b.node && a.tick < b.tick) || (a.node != b.node && a.tick + delta < b.tick);
  };
  const auto& s = r.snapshots;
  for (std::size_t x = 0; x < s.size(); ++x) {
    for (std::size_t y = x + 1; y < s.size(); ++y) {
      const auto& a = s[x];
      const auto& b = s[y];
      ++v.windows;
      const bool ab = prefix(a.trie_node, b.trie_node);
      const bool ba = prefix(b.trie_node, a.trie_node);
      const bool bad = (!ab && !ba) || (must_precede(a, b) && !ab) || (must_precede(b, a) && !ba);
      if (!bad) continue;
      ++v.violations;
      std::ostringstream os;
      os << "node " << a.node << " @" << a.tick << " vs node " << b.node << " @" << b.tick
         << (!ab && !ba ? ": diverged" : ": wrong order");
      note(v, os.str());
    }
  }
  v.detail["snapshots"] = s.size();
  return v;
}

PropertyVerdict check_quality_growth(const RunReport& r, unsigned gamma) {
  PropertyVerdict v;
  v.property = "quality_growth";
  const std::uint32_t T = r.config.params.T;
  const double need = gamma * static_cast<double>(r.k()) * quality_fraction(r.config.f) * T;
  v.threshold = need;
  const std::uint64_t w = r.growth_window;
  const std::uint64_t len = (gamma + 2) * w + 2 * r.config.delta;
  const std::uint64_t te = std::max<std::uint64_t>(1, r.trace_every);
  std::vector<const TraceSample*> grid;
  for (const auto& s : r.trace) {
    if (s.tick % te == 0 && s.tick >= w) grid.push_back(&s);
  }
  const std::size_t span = std::max<std::uint64_t>(1, len / te);
  v.detail["window_ticks"] = span * te;
  v.detail["gamma"] = gamma;
  for (std::size_t a = 0; a + span < grid.size(); ++a) {
    const auto& s0 = *grid[a];
    const auto& s1 = *grid[a + span];
    for (std::uint64_t u = 0; u < r.honest_nodes; ++u) {
      ++v.windows;
      auto added = static_cast<double>(s1.scb_honest[u]) - static_cast<double>(s0.scb_honest[u]);
      if (added + kEps < need) {
        ++v.violations;
        std::ostringstream os;
        os << "node " << u << " added " << added << " honest blocks in [" << s0.tick << ", " << s1.tick << "]";
        note(v, os.str());
      }
    }
  }
  return v;
}

json to_json(const PropertyVerdict& v) {
  return {{"property", v.property},   {"windows", v.windows},
          {"violations", v.violations}, {"violating_fraction", v.violating_fraction()},
          {"threshold", v.threshold},  {"examples", v.examples},
          {"detail", v.detail}};
}

}  // namespace parchain::simnet
