#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ocs {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

// On-demand verification suites: exact subset probabilities against an
// independent recursive enumerator, analytic gradients against central
// finite differences, Monte-Carlo estimator bias and sampler/probability
// consistency. Deterministic given the seed.
std::vector<CheckResult> run_selfchecks(std::uint64_t seed);

}  // namespace ocs
