#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fieldtail {

struct CheckResult {
    std::string name;
    bool passed = false;
    /// Worst observed deviation (or the checked quantity).
    double measured = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

struct VerifyOptions {
    std::uint64_t seed = 20240611;
};

/// Cross-module invariant suite: algebraic identities, gradient checks,
/// quadrature oracles, special functions.
std::vector<CheckResult> run_verify(const VerifyOptions& options = {});

}  // namespace fieldtail
