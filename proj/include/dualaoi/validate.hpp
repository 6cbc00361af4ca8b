#pragma once

// Built-in self-check: closed forms against their alternative derivations and
// the simulator against the closed forms.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace dualaoi::validate {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct ValidateOptions {
    std::uint64_t seed = 1;
    /// Accepted deliveries per simulation run.
    std::uint64_t accepted = 200'000;
    /// Classified refreshes used for the path-statistics check.
    std::uint64_t refreshes = 400'000;
    /// Accepted samples per (k, n) state of the conditional M-D oracle.
    std::uint64_t oracle_samples = 20'000;
};

std::vector<CheckResult> run_validation(const ValidateOptions& options);

/// One "PASS|FAIL name: detail" line per check and a summary; returns true
/// when all checks passed.
bool print_report(std::ostream& out, const std::vector<CheckResult>& results);

}  // namespace dualaoi::validate
