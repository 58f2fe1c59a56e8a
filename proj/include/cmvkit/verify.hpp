#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cmvkit/types.hpp"

namespace cmvkit {

struct CheckResult {
    std::string name;
    double worst = 0.0;
    double threshold = 0.0;
    int cases = 0;
    bool pass = false;
    std::string note;
};

// Seeded random battery over the library invariants; one result per
// invariant family. Deterministic for fixed (seed, cases, tolerances).
std::vector<CheckResult> run_verification(std::uint64_t seed, int cases,
                                          const Tolerances& tol = {});

} // namespace cmvkit
