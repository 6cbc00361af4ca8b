#pragma once

// Command-line front end: `analytic`, `simulate`, `sweep` and `validate`.

#include "dualaoi/sim.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace dualaoi::cli {

/// Environment variable consulted for the seed when no --seed flag is given.
inline constexpr const char* kSeedEnv = "DUALAOI_SEED";

/// Runs the CLI on `args` (program name excluded) and returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// JSON document printed by `simulate`: config echo, statistics and the
/// closed-form reference with relative errors (null when none exists).
std::string simulate_json(const sim::SimConfig& config, const sim::SimResult& result);

}  // namespace dualaoi::cli
