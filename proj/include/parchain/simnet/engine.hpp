#pragma once

#include "parchain/simnet/config.hpp"
#include "parchain/simnet/report.hpp"

namespace parchain::simnet {

/// Runs one simulation. The result depends only on the config (including
/// its seed); generated_at is left empty.
RunReport run(const SimConfig& config);

}  // namespace parchain::simnet
