#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "parchain/simnet/report.hpp"

namespace parchain::simnet {

/// Outcome of one property check. Probabilistic properties are summarized by
/// the fraction of windows that miss the bound.
struct PropertyVerdict {
  std::string property;
  std::uint64_t windows = 0;
  std::uint64_t violations = 0;
  double threshold = 0.0;
  std::vector<std::string> examples;  // the first few violations
  nlohmann::json detail = nlohmann::json::object();

  double violating_fraction() const {
    return windows == 0 ? 0.0 : static_cast<double>(violations) / static_cast<double>(windows);
  }
};

/// (1 - 2f) / (1 - f).
double quality_fraction(double f);

/// Each chain on each node grows by T blocks in every growth window. Windows
/// are measured on the trace grid, rounded down to whole samples.
PropertyVerdict check_growth(const RunReport& report);

/// Honest share of every T consecutive blocks on every chain of every
/// snapshot path; each distinct window is counted once. detail holds the
/// per-chain breakdown.
PropertyVerdict check_quality(const RunReport& report);

/// Every pair of SCB snapshots is prefix-ordered, in the required direction
/// when both are on one node or far enough apart in time.
PropertyVerdict check_consistency(const RunReport& report);

/// Honest blocks added to each node's SCB over windows of
/// (gamma + 2) * growth_window + 2 delta ticks, after the first growth
/// window.
PropertyVerdict check_quality_growth(const RunReport& report, unsigned gamma = 1);

nlohmann::json to_json(const PropertyVerdict& v);

}  // namespace parchain::simnet
