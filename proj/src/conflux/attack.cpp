#include "parchain/conflux/attack.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <thread>

#include "parchain/conflux/ghost_tree.hpp"
#include "parchain/hash_value.hpp"
#include "parchain/rng.hpp"

namespace parchain::conflux {

using nlohmann::json;

std::string_view to_string(ReleaseRule r) { return r == ReleaseRule::view_deficit ? "view_deficit" : "per_round"; }

ReleaseRule release_rule_from_string(std::string_view s) {
  if (s == "view_deficit") return ReleaseRule::view_deficit;
  if (s == "per_round") return ReleaseRule::per_round;
  throw ConfigError("unknown release rule '" + std::string(s) + "'");
}

void AttackConfig::validate() const {
  if (blocks_per_round == 0) throw ConfigError("blocks_per_round must be positive");
  if (!(f >= 0.0) || f >= 0.5) throw ConfigError("f must lie in [0, 1/2)");
  if (max_rounds == 0) throw ConfigError("max_rounds must be positive");
  if (trials == 0) throw ConfigError("trials must be positive");
}

namespace {

/// One partition's view, with the mapping from global block keys to tree ids.
struct View {
  GhostTree tree;
  std::vector<BlockId> id_of;  // by key

  void reset() {
    tree.clear(0);
    id_of.assign(1, 0);
  }
  BlockId add(std::uint64_t parent_key, std::uint32_t count, std::uint64_t first_key) {
    auto first = tree.add_siblings(id_of.at(parent_key), count, first_key);
    if (id_of.size() < first_key + count) id_of.resize(first_key + count, kNoParent);
    for (std::uint32_t j = 0; j < count; ++j) id_of[first_key + j] = first + j;
    return first;
  }
  std::uint64_t weight(std::uint64_t key) const { return tree.weight(id_of.at(key)); }
  std::uint64_t leaf_key() const { return tree.key(tree.ghost_leaf()); }
  bool prefers(std::uint64_t key) const {
    auto c = tree.preferred_child(0);
    return c != kNoParent && tree.key(c) == key;
  }
};

struct Release {
  int target;  // 0: U, 1: V
  std::uint64_t parent_key;
  std::uint32_t count;
  std::uint64_t first_key;
};

class Trial {
 public:
  Trial(const AttackConfig& c, std::uint64_t index) : c_(c), rng_(make_rng(c.seed, {index})) {}

  TrialResult run() {
    for (auto* v : {&u_, &v_}) v->reset();
    branch_.assign(1, 0);

    // Round r: honest blocks land as siblings under C while the adversary
    // mines the two-block seeds of both branches.
    std::poisson_distribution<std::uint32_t> all_honest(c_.blocks_per_round * (1.0 - c_.f));
    if (auto h = all_honest(rng_); h > 0) add_everywhere(0, h, 0);
    a1_ = add_private(0, 0, 1, 1);
    a2_ = add_private(0, a1_, 1, 1);
    b1_ = add_private(1, 0, 1, 2);
    b2_ = add_private(1, b1_, 1, 2);

    std::poisson_distribution<std::uint32_t> half_honest(c_.blocks_per_round * (1.0 - c_.f) / 2.0);
    std::poisson_distribution<std::uint32_t> adversarial(c_.blocks_per_round * c_.f);
    TrialResult out;
    while (true) {
      const auto leaf_u = u_.leaf_key();
      const auto leaf_v = v_.leaf_key();
      const auto xa = half_honest(rng_);
      const auto xb = half_honest(rng_);
      auto z = adversarial(rng_);
      // Odd-numbered blocks go to the A bank, even-numbered ones to B.
      bank_a_ += (z + (mined_ % 2 == 0 ? 1 : 0)) / 2;
      bank_b_ += (z + (mined_ % 2 == 1 ? 1 : 0)) / 2;
      mined_ += z;

      // End of round: last round's targeted releases are forwarded, then
      // every honest block reaches everyone.
      for (const auto& r : forward_) (r.target == 0 ? u_ : v_).add(r.parent_key, r.count, r.first_key);
      forward_.clear();
      if (xa > 0) add_everywhere(leaf_u, xa, branch_.at(leaf_u));
      if (xb > 0) add_everywhere(leaf_v, xb, branch_.at(leaf_v));

      std::uint64_t ya = 0;
      std::uint64_t yb = 0;
      if (c_.rule == ReleaseRule::view_deficit) {
        auto wa = u_.weight(a1_), wb = u_.weight(b1_);
        ya = wb >= wa ? wb - wa + 1 : 0;
        wa = v_.weight(a1_), wb = v_.weight(b1_);
        yb = wa >= wb ? wa - wb + 1 : 0;
      } else {
        ya = xb >= xa ? xb - xa + 1 : 0;
        yb = xa >= xb ? xa - xb + 1 : 0;
      }
      if (ya > bank_a_ || yb > bank_b_) break;
      bank_a_ -= ya;
      bank_b_ -= yb;
      if (ya > 0) add_private(0, a2_, static_cast<std::uint32_t>(ya), 1);
      if (yb > 0) add_private(1, b2_, static_cast<std::uint32_t>(yb), 2);
      if (!u_.prefers(a1_) || !v_.prefers(b1_)) break;
      if (++out.rounds == c_.max_rounds) {
        out.capped = true;
        break;
      }
    }
    out.fork_length = std::min(depth_[1], depth_[2]);
    return out;
  }

 private:
  std::uint64_t fresh(std::uint32_t count, std::uint8_t branch) {
    auto k = next_key_;
    next_key_ += count;
    branch_.resize(next_key_, branch);
    return k;
  }

  // Depth is structural, so any view holding the block gives the same value.
  void note_depth(std::uint8_t branch, const View& view, BlockId id) {
    if (branch != 0) depth_[branch] = std::max(depth_[branch], view.tree.depth(id));
  }

  void add_everywhere(std::uint64_t parent_key, std::uint32_t count, std::uint8_t branch) {
    auto k = fresh(count, branch);
    note_depth(branch, u_, u_.add(parent_key, count, k));
    v_.add(parent_key, count, k);
  }

  /// Adds a block known to one partition now and to the other a round later.
  std::uint64_t add_private(int target, std::uint64_t parent_key, std::uint32_t count, std::uint8_t branch) {
    auto k = fresh(count, branch);
    auto& view = target == 0 ? u_ : v_;
    note_depth(branch, view, view.add(parent_key, count, k));
    forward_.push_back({1 - target, parent_key, count, k});
    return k;
  }

  const AttackConfig& c_;
  Rng rng_;
  View u_;
  View v_;
  std::vector<std::uint8_t> branch_;  // by key: 0 none, 1 A, 2 B
  std::uint32_t depth_[3] = {0, 0, 0};
  std::vector<Release> forward_;
  std::uint64_t next_key_ = 1;
  std::uint64_t a1_ = 0, a2_ = 0, b1_ = 0, b2_ = 0;
  std::uint64_t bank_a_ = 0;
  std::uint64_t bank_b_ = 0;
  std::uint64_t mined_ = 0;
};

}  // namespace

TrialResult run_trial(const AttackConfig& config, std::uint64_t trial) {
  config.validate();
  return Trial(config, trial).run();
}

AttackResult run_attack(const AttackConfig& config) {
  config.validate();
  AttackResult res;
  res.config = config;
  res.trials.resize(config.trials);
  unsigned threads = config.threads > 0 ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, config.trials));
  std::atomic<std::uint64_t> next{0};
  auto work = [&] {
    for (auto i = next.fetch_add(1); i < config.trials; i = next.fetch_add(1)) {
      res.trials[i] = Trial(config, i).run();
    }
  };
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  return res;
}

std::uint32_t AttackResult::quantile(double q) const {
  if (trials.empty()) return 0;
  std::vector<std::uint32_t> xs;
  xs.reserve(trials.size());
  for (const auto& t : trials) xs.push_back(t.fork_length);
  std::sort(xs.begin(), xs.end());
  auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(xs.size())));
  return xs[std::clamp<std::size_t>(rank, 1, xs.size()) - 1];
}

double AttackResult::mean_fork_length() const {
  double s = 0.0;
  for (const auto& t : trials) s += t.fork_length;
  return trials.empty() ? 0.0 : s / static_cast<double>(trials.size());
}

double AttackResult::capped_fraction() const {
  std::size_t n = 0;
  for (const auto& t : trials) n += t.capped ? 1 : 0;
  return trials.empty() ? 0.0 : static_cast<double>(n) / static_cast<double>(trials.size());
}

std::vector<AttackResult> run_sweep(const AttackSweep& sweep) {
  std::vector<AttackResult> out;
  for (auto bpr : sweep.blocks_per_round) {
    for (auto f : sweep.f) {
      AttackConfig c = sweep.base;
      c.blocks_per_round = bpr;
      c.f = f;
      out.push_back(run_attack(c));
    }
  }
  return out;
}

void write_attack_csv(const std::vector<AttackResult>& results, const std::vector<double>& quantiles,
                      std::ostream& out) {
  out << "blocks_per_round,f,quantile,fork_length\n";
  for (const auto& r : results) {
    for (double q : quantiles) {
      out << r.config.blocks_per_round << ',' << r.config.f << ',' << q << ',' << r.quantile(q) << '\n';
    }
  }
}

double min_f_reaching(const std::vector<AttackResult>& results, std::uint32_t blocks_per_round, double q,
                      std::uint32_t length) {
  double best = -1.0;
  for (const auto& r : results) {
    if (r.config.blocks_per_round != blocks_per_round || r.quantile(q) < length) continue;
    if (best < 0.0 || r.config.f < best) best = r.config.f;
  }
  return best;
}

namespace {

template <class T>
std::vector<T> scalar_or_list(const json& v) {
  if (v.is_array()) return v.get<std::vector<T>>();
  return {v.get<T>()};
}

}  // namespace

AttackSweep attack_sweep_from_json(const json& j) {
  AttackSweep s;
  try {
    auto& b = s.base;
    if (j.contains("max_rounds")) b.max_rounds = j.at("max_rounds");
    if (j.contains("trials")) b.trials = j.at("trials");
    if (j.contains("seed")) b.seed = j.at("seed");
    if (j.contains("threads")) b.threads = j.at("threads");
    if (j.contains("rule")) b.rule = release_rule_from_string(j.at("rule").get<std::string>());
    if (j.contains("blocks_per_round")) s.blocks_per_round = scalar_or_list<std::uint32_t>(j.at("blocks_per_round"));
    if (j.contains("f")) s.f = scalar_or_list<double>(j.at("f"));
    if (j.contains("quantiles")) s.quantiles = scalar_or_list<double>(j.at("quantiles"));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad attack config: ") + e.what());
  }
  for (auto bpr : s.blocks_per_round) {
    for (auto f : s.f) {
      AttackConfig c = s.base;
      c.blocks_per_round = bpr;
      c.f = f;
      c.validate();
    }
  }
  for (double q : s.quantiles) {
    if (!(q > 0.0 && q <= 1.0)) throw ConfigError("quantiles must lie in (0, 1]");
  }
  return s;
}

json to_json(const AttackConfig& c) {
  return {{"blocks_per_round", c.blocks_per_round}, {"f", c.f},         {"max_rounds", c.max_rounds},
          {"trials", c.trials},                     {"seed", c.seed},   {"rule", to_string(c.rule)}};
}

}  // namespace parchain::conflux
