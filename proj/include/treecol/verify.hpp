#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "treecol/paths.hpp"
#include "treecol/tree.hpp"

namespace treecol {

struct CheckResult {
    std::string name;
    std::string status;  // "pass" | "fail" | "skip" | "warn"
    std::string detail;
};

struct VerifyOptions {
    int b = 2;
    int H = 1;
    int q = 3;
    std::uint64_t seed = 0;
    std::int64_t trials = 100'000;
    std::int64_t omega_cap = kDefaultOmegaCap;
    std::int64_t pair_budget = kDefaultPairBudget;
    int threads = 1;
};

// Runs every check the instance supports: exact sections (matrix structure,
// ergodicity, mixing vs the closed-form ceiling, canonical paths and
// congestion, replay counts, forced-set oracle equivalence, enumerated
// probabilities, exact conductance) where the state space is enumerable,
// Monte Carlo sections and the pure bound suite always.
std::vector<CheckResult> verify_all(const VerifyOptions& options);

// True iff no check failed (skips and warnings do not count as failures).
bool all_pass(const std::vector<CheckResult>& checks);

}  // namespace treecol
