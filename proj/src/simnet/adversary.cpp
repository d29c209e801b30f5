#include "parchain/simnet/adversary.hpp"

namespace parchain::simnet {

TrailingLiar::TrailingLiar(ParallelNode view, std::uint64_t burst_ticks, std::uint64_t pause_ticks)
    : Adversary(std::move(view)), burst_ticks_(burst_ticks), pause_ticks_(pause_ticks) {
  if (burst_ticks_ == 0) throw ConfigError("trailing_liar needs burst_ticks > 0");
}

std::optional<bool> TrailingLiar::burst_active(std::uint64_t t) const {
  // Each period opens with an honest pause so the chains have some height
  // before the first burst.
  return t % (burst_ticks_ + pause_ticks_) >= pause_ticks_;
}

void TrailingLiar::on_tick(Context& ctx) {
  const bool lying = *burst_active(ctx.now());
  const HashValue stale = view_.genesis_hash(0);
  while (ctx.queries_left() > 0) {
    auto solved = ctx.query([&] {
      auto c = view_.assemble(ctx.make_payload(), ctx.make_nonce());
      if (lying) c.trailing = stale;
      return c;
    });
    if (!solved) continue;
    auto m = view_.seal(std::move(solved->candidate), solved->hash);
    ctx.publish(m, ctx.now() + 1);
  }
}

ChainFocus::ChainFocus(ParallelNode view, std::uint32_t target) : Adversary(std::move(view)), target_(target) {
  if (target_ >= view_.chain_count()) throw ConfigError("chain_focus target chain out of range");
}

void ChainFocus::on_tick(Context& ctx) {
  while (ctx.queries_left() > 0) {
    auto solved = mine_honestly(ctx);
    if (!solved || chain_index(solved->hash, view_.chain_count()) != target_) continue;
    auto m = view_.seal(std::move(solved->candidate), solved->hash);
    ctx.publish(m, ctx.now() + 1);
  }
}

namespace {

template <class T>
T option(const SimConfig& config, const char* key, T fallback) {
  const auto& o = config.adversary.options;
  if (!o.is_object() || !o.contains(key)) return fallback;
  try {
    return o.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("bad adversary option '") + key + "'");
  }
}

}  // namespace

template <>
std::unique_ptr<Adversary<ParallelNode>> make_adversary(const SimConfig& config, ParallelNode view) {
  const auto& s = config.adversary.strategy;
  if (s == "honest_shadow") return std::make_unique<HonestShadow<ParallelNode>>(std::move(view));
  if (s == "withholder") return std::make_unique<Withholder<ParallelNode>>(std::move(view));
  if (s == "trailing_liar") {
    auto burst = option<std::uint64_t>(config, "burst_ticks", 20 * config.delta);
    auto pause = option<std::uint64_t>(config, "pause_ticks", 20 * config.delta);
    return std::make_unique<TrailingLiar>(std::move(view), burst, pause);
  }
  if (s == "chain_focus") {
    return std::make_unique<ChainFocus>(std::move(view), option<std::uint32_t>(config, "target_chain", 0));
  }
  throw ConfigError("unknown adversary strategy '" + s + "'");
}

template <>
std::unique_ptr<Adversary<NakamotoNode>> make_adversary(const SimConfig& config, NakamotoNode view) {
  const auto& s = config.adversary.strategy;
  if (s == "honest_shadow") return std::make_unique<HonestShadow<NakamotoNode>>(std::move(view));
  if (s == "withholder") return std::make_unique<Withholder<NakamotoNode>>(std::move(view));
  if (s == "trailing_liar" || s == "chain_focus") {
    throw ConfigError("strategy '" + s + "' needs the parallel-chain protocol");
  }
  throw ConfigError("unknown adversary strategy '" + s + "'");
}

}  // namespace parchain::simnet
